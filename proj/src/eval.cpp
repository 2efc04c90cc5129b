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

#include "nerkit/eval.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace nerkit {

namespace {

double fraction(long long num, long long den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double f1_of(double p, double r) {
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

void check_aligned(const Corpus& gold, const Corpus& pred) {
  const std::size_t n = std::min(gold.size(), pred.size());
  if (gold.size() != pred.size()) {
    throw std::invalid_argument(
        "corpora misaligned at sentence " + std::to_string(n) +
        ": gold has " + std::to_string(gold.size()) + " sentences, pred has " +
        std::to_string(pred.size()));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (gold.sentences[i].size() != pred.sentences[i].size()) {
      throw std::invalid_argument(
          "corpora misaligned at sentence " + std::to_string(i) + ": " +
          std::to_string(gold.sentences[i].size()) + " vs " +
          std::to_string(pred.sentences[i].size()) + " tokens");
    }
    if (!gold.sentences[i].tagged()) {
      throw std::invalid_argument("gold sentence " + std::to_string(i) +
                                  " is untagged");
    }
    if (!pred.sentences[i].tagged()) {
      throw std::invalid_argument("pred sentence " + std::to_string(i) +
                                  " is untagged");
    }
  }
}

}  // namespace

EvalReport score(const Corpus& gold, const Corpus& pred,
                 bool include_absent_classes) {
  check_aligned(gold, pred);

  EvalReport report;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    report.classes[c].cls = static_cast<EntityClass>(c);
  }
  report.sentences = gold.size();

  for (std::size_t i = 0; i < gold.size(); ++i) {
    std::vector<EntitySpan> gold_spans =
        tags_to_spans(repair_bio(*gold.sentences[i].tags));
    std::vector<EntitySpan> pred_spans =
        tags_to_spans(repair_bio(*pred.sentences[i].tags));
    report.gold_spans += gold_spans.size();
    report.pred_spans += pred_spans.size();
    // Spans within one sentence are disjoint, so matching by identical
    // (start, end, class) is one-to-one.
    for (const EntitySpan& ps : pred_spans) {
      auto& cs = report.classes[static_cast<std::size_t>(ps.cls)];
      if (std::find(gold_spans.begin(), gold_spans.end(), ps) !=
          gold_spans.end()) {
        ++cs.tp;
      } else {
        ++cs.fp;
      }
    }
    for (const EntitySpan& gs : gold_spans) {
      if (std::find(pred_spans.begin(), pred_spans.end(), gs) ==
          pred_spans.end()) {
        ++report.classes[static_cast<std::size_t>(gs.cls)].fn;
      }
    }
  }

  long long tp = 0, fp = 0, fn = 0;
  for (ClassScore& cs : report.classes) {
    cs.precision = fraction(cs.tp, cs.tp + cs.fp);
    cs.recall = fraction(cs.tp, cs.tp + cs.fn);
    cs.f1 = f1_of(cs.precision, cs.recall);
    tp += cs.tp;
    fp += cs.fp;
    fn += cs.fn;
    if (include_absent_classes || cs.tp + cs.fp + cs.fn > 0) {
      report.included.push_back(cs.cls);
    }
  }

  if (!report.included.empty()) {
    double p_sum = 0.0, r_sum = 0.0, f_sum = 0.0;
    for (EntityClass cls : report.included) {
      const ClassScore& cs = report.classes[static_cast<std::size_t>(cls)];
      p_sum += cs.precision;
      r_sum += cs.recall;
      f_sum += cs.f1;
    }
    const double k = static_cast<double>(report.included.size());
    report.macro_precision = p_sum / k;
    report.macro_recall = r_sum / k;
    report.macro_f1 = f_sum / k;
  }

  report.micro_precision = fraction(tp, tp + fp);
  report.micro_recall = fraction(tp, tp + fn);
  report.micro_f1 = f1_of(report.micro_precision, report.micro_recall);
  return report;
}

ConfusionMatrix confusion(const Corpus& gold, const Corpus& pred) {
  check_aligned(gold, pred);
  ConfusionMatrix matrix{};
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto& g = *gold.sentences[i].tags;
    const auto& p = *pred.sentences[i].tags;
    for (std::size_t t = 0; t < g.size(); ++t) {
      ++matrix[static_cast<std::size_t>(g[t].id())]
              [static_cast<std::size_t>(p[t].id())];
    }
  }
  return matrix;
}

std::string format_report(const EvalReport& report) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  auto pct = [](double v) { return 100.0 * v; };

  out << std::left << std::setw(8) << "class" << std::right << std::setw(7)
      << "gold" << std::setw(7) << "pred" << std::setw(7) << "TP"
      << std::setw(7) << "FP" << std::setw(7) << "FN" << std::setw(9)
      << "prec" << std::setw(9) << "recall" << std::setw(9) << "f1" << "\n";
  long long tp = 0, fp = 0, fn = 0;
  for (const ClassScore& cs : report.classes) {
    tp += cs.tp;
    fp += cs.fp;
    fn += cs.fn;
    out << std::left << std::setw(8) << std::string(class_name(cs.cls))
        << std::right << std::setw(7) << cs.tp + cs.fn << std::setw(7)
        << cs.tp + cs.fp << std::setw(7) << cs.tp << std::setw(7) << cs.fp
        << std::setw(7) << cs.fn << std::setw(9) << pct(cs.precision)
        << std::setw(9) << pct(cs.recall) << std::setw(9) << pct(cs.f1)
        << "\n";
  }
  out << std::left << std::setw(8) << "micro" << std::right << std::setw(7)
      << tp + fn << std::setw(7) << tp + fp << std::setw(7) << tp
      << std::setw(7) << fp << std::setw(7) << fn << std::setw(9)
      << pct(report.micro_precision) << std::setw(9)
      << pct(report.micro_recall) << std::setw(9) << pct(report.micro_f1)
      << "\n";
  out << std::left << std::setw(8) << "macro" << std::right
      << std::setw(35) << "" << std::setw(9) << pct(report.macro_precision)
      << std::setw(9) << pct(report.macro_recall) << std::setw(9)
      << pct(report.macro_f1) << "\n";
  out << "sentences: " << report.sentences
      << "  gold spans: " << report.gold_spans
      << "  pred spans: " << report.pred_spans << "\n";
  return out.str();
}

std::string report_to_json(const EvalReport& report,
                           const ConfusionMatrix* confusion_matrix) {
  nlohmann::json classes = nlohmann::json::object();
  for (const ClassScore& cs : report.classes) {
    classes[std::string(class_name(cs.cls))] = {
        {"tp", cs.tp},           {"fp", cs.fp},
        {"fn", cs.fn},           {"precision", cs.precision},
        {"recall", cs.recall},   {"f1", cs.f1}};
  }
  std::vector<std::string> included;
  for (EntityClass cls : report.included) {
    included.emplace_back(class_name(cls));
  }
  nlohmann::json j = {
      {"classes", classes},
      {"included_classes", included},
      {"macro",
       {{"precision", report.macro_precision},
        {"recall", report.macro_recall},
        {"f1", report.macro_f1}}},
      {"micro",
       {{"precision", report.micro_precision},
        {"recall", report.micro_recall},
        {"f1", report.micro_f1}}},
      {"sentences", report.sentences},
      {"gold_spans", report.gold_spans},
      {"pred_spans", report.pred_spans}};
  if (confusion_matrix != nullptr) {
    nlohmann::json labels = nlohmann::json::array();
    for (const std::string& name : tag_names()) {
      labels.push_back(name);
    }
    nlohmann::json matrix = nlohmann::json::array();
    for (const auto& row : *confusion_matrix) {
      matrix.push_back(row);
    }
    j["confusion"] = {{"labels", labels}, {"matrix", matrix}};
  }
  return j.dump(2) + "\n";
}

}  // namespace nerkit
