// Copyright 2026 The Frameprobe Authors
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

// Umbrella header for the whole library (the CLI layer is separate in
// cli.hpp since it pulls in the argument parser).

#pragma once

#include "frameprobe/confidence.hpp"
#include "frameprobe/errors.hpp"
#include "frameprobe/frame.hpp"
#include "frameprobe/io.hpp"
#include "frameprobe/oracle.hpp"
#include "frameprobe/perturb.hpp"
#include "frameprobe/records.hpp"
#include "frameprobe/report.hpp"
#include "frameprobe/rng.hpp"
#include "frameprobe/taxonomy.hpp"
#include "frameprobe/version.hpp"
