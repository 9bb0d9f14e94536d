// Copyright 2026 The aerialdet Authors
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

#pragma once

#include "aerialdet/config.hpp"
#include "aerialdet/detector.hpp"
#include "aerialdet/error.hpp"
#include "aerialdet/evaluation.hpp"
#include "aerialdet/external_backend.hpp"
#include "aerialdet/geometry.hpp"
#include "aerialdet/io.hpp"
#include "aerialdet/pipeline.hpp"
#include "aerialdet/proposer.hpp"
#include "aerialdet/rng.hpp"
#include "aerialdet/scheduler.hpp"
#include "aerialdet/simulation.hpp"
#include "aerialdet/temporal_gate.hpp"
