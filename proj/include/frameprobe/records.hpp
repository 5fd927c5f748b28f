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

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace frameprobe {

// One model output to analyze: the utterance, the gold frame, the predicted
// frame, and optional per-token probabilities aligned to the predicted
// tokens. `forced_pred` is a teacher-forced decode (argmax under gold
// history) when the producing model supplied one.
//
// Invariants enforced at load time (see io.hpp): gold tokenizes and is
// schema-valid; token_probs, when present, has one value in (0,1] per
// predicted token. The predicted frame may be arbitrarily broken; it only
// has to tokenize.
//
// The injected_* fields are populated by the perturbation corpus builder so
// synthetic corpora carry their own ground truth. They hold wire-level
// strings ("intent", "slot", "ood", "mode", "leaf" and the edit detail).
struct PredictionRecord {
  std::string utterance;
  std::string gold;
  std::string pred;
  std::optional<std::vector<double>> token_probs;
  std::optional<std::string> forced_pred;
  std::optional<std::string> language;
  std::optional<std::string> domain;
  std::optional<std::string> injected_type;
  std::optional<std::size_t> injected_position;
  std::optional<std::string> injected_detail;
};

}  // namespace frameprobe
