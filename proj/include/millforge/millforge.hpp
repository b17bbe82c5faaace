// Copyright 2026 The Millforge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Umbrella header.

#include "millforge/bits.hpp"
#include "millforge/cost_model.hpp"
#include "millforge/errors.hpp"
#include "millforge/leaf.hpp"
#include "millforge/merge.hpp"
#include "millforge/nonlinear.hpp"
#include "millforge/report.hpp"
#include "millforge/reuse.hpp"
#include "millforge/session.hpp"
#include "millforge/tape.hpp"
#include "millforge/task.hpp"
#include "millforge/transport.hpp"
