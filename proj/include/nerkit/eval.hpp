// Copyright 2026 The nerkit Authors
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

#ifndef NERKIT_EVAL_HPP_
#define NERKIT_EVAL_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nerkit/bio.hpp"
#include "nerkit/corpus.hpp"

namespace nerkit {

// Span-level counts and fractions for one class. Zero denominators yield 0
// so aggregation stays total.
struct ClassScore {
  EntityClass cls = EntityClass::PER;
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Macro scores are unweighted means of the per-class values over the
// included classes — macro F1 averages per-class F1 directly; it is NOT
// the harmonic mean of macro precision and macro recall. Micro scores pool
// TP/FP/FN over all classes.
struct EvalReport {
  std::array<ClassScore, kNumClasses> classes;
  std::vector<EntityClass> included;  // classes in the macro average
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double micro_precision = 0.0;
  double micro_recall = 0.0;
  double micro_f1 = 0.0;
  std::size_t sentences = 0;
  std::size_t gold_spans = 0;
  std::size_t pred_spans = 0;
};

// Exact span matching: a predicted span counts as a true positive iff a
// gold span with the same (start, end, class) exists in the same sentence.
// Both tag sequences are BIO-repaired before span extraction, so raw model
// output is always scoreable. With include_absent_classes the macro average
// runs over all 6 classes; otherwise only over classes with at least one
// gold or predicted span. Throws std::invalid_argument on misaligned or
// untagged corpora, naming the first offending sentence index.
EvalReport score(const Corpus& gold, const Corpus& pred,
                 bool include_absent_classes = false);

// Token-level confusion counts; entry (i, j) counts tokens with gold label
// id i and predicted label id j (raw tags, no repair).
using ConfusionMatrix =
    std::array<std::array<long long, kNumLabels>, kNumLabels>;
ConfusionMatrix confusion(const Corpus& gold, const Corpus& pred);

// Aligned human-readable table; percentages with two decimals.
std::string format_report(const EvalReport& report);

// Structured document with all counts and fractions at full precision.
std::string report_to_json(const EvalReport& report,
                           const ConfusionMatrix* confusion_matrix = nullptr);

}  // namespace nerkit

#endif  // NERKIT_EVAL_HPP_
