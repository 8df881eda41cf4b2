// Copyright 2026 The qaipf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QAIPF_QAIPF_HPP
#define QAIPF_QAIPF_HPP

// Umbrella header.
#include "qaipf/bits.hpp"
#include "qaipf/errors.hpp"
#include "qaipf/estimator.hpp"
#include "qaipf/evolution.hpp"
#include "qaipf/model.hpp"
#include "qaipf/numeric.hpp"
#include "qaipf/oracle.hpp"
#include "qaipf/parallel.hpp"
#include "qaipf/random.hpp"
#include "qaipf/sampling.hpp"
#include "qaipf/serialization.hpp"

#endif  // QAIPF_QAIPF_HPP
