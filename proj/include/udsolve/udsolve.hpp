// Copyright 2026 The udsolve Authors
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

#ifndef UDSOLVE_UDSOLVE_HPP
#define UDSOLVE_UDSOLVE_HPP

#include "udsolve/bp.hpp"
#include "udsolve/generators.hpp"
#include "udsolve/instance.hpp"
#include "udsolve/io.hpp"
#include "udsolve/oracle.hpp"
#include "udsolve/rebalance.hpp"
#include "udsolve/slow_demo.hpp"
#include "udsolve/verify.hpp"

#endif  // UDSOLVE_UDSOLVE_HPP
