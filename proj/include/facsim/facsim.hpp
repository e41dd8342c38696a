// Copyright 2026 The facsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "facsim/case_engine.hpp"
#include "facsim/common.hpp"
#include "facsim/config.hpp"
#include "facsim/event_log.hpp"
#include "facsim/io.hpp"
#include "facsim/population.hpp"
#include "facsim/reports.hpp"
#include "facsim/rng.hpp"
#include "facsim/seirs.hpp"
#include "facsim/simulation.hpp"
#include "facsim/visitation.hpp"
#include "facsim/workforce.hpp"
#include "facsim/world.hpp"
