// Copyright 2026 The dhprep Authors.
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

#include "dhprep/alias_table.hpp"
#include "dhprep/checkpoint.hpp"
#include "dhprep/config.hpp"
#include "dhprep/errors.hpp"
#include "dhprep/eval.hpp"
#include "dhprep/gradcheck.hpp"
#include "dhprep/intensity.hpp"
#include "dhprep/kernels.hpp"
#include "dhprep/model.hpp"
#include "dhprep/objective.hpp"
#include "dhprep/random.hpp"
#include "dhprep/synthgen.hpp"
#include "dhprep/temporal_graph.hpp"
#include "dhprep/text.hpp"
#include "dhprep/training.hpp"
