// Copyright 2026 The udbm Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef UDBM_UDBM_HPP
#define UDBM_UDBM_HPP

#include "udbm/baseline.hpp"
#include "udbm/bench.hpp"
#include "udbm/check.hpp"
#include "udbm/checkpoint.hpp"
#include "udbm/common.hpp"
#include "udbm/config.hpp"
#include "udbm/coupling.hpp"
#include "udbm/data.hpp"
#include "udbm/estimator.hpp"
#include "udbm/init.hpp"
#include "udbm/model.hpp"
#include "udbm/optim.hpp"
#include "udbm/oracle.hpp"
#include "udbm/parallel.hpp"
#include "udbm/rng.hpp"
#include "udbm/search.hpp"
#include "udbm/stats.hpp"
#include "udbm/training.hpp"

#endif  // UDBM_UDBM_HPP
