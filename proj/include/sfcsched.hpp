/*
Copyright 2026 The sfcsched Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include "sfcsched/error.hpp"
#include "sfcsched/sfc_model.hpp"
#include "sfcsched/infrastructure.hpp"
#include "sfcsched/labeling.hpp"
#include "sfcsched/policy.hpp"
#include "sfcsched/fws.hpp"
#include "sfcsched/greedy.hpp"
#include "sfcsched/network.hpp"
#include "sfcsched/scenario.hpp"
#include "sfcsched/simulation.hpp"
#include "sfcsched/results.hpp"
#include "sfcsched/sweep.hpp"
#include "sfcsched/scenario_io.hpp"
