#include "vitprobe/metrics.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "vitprobe/error.hpp"

namespace vitprobe {

void CostTable::validate() const {
  if (correct != 0.0) raise(ErrorKind::ConfigError, "c_correct must be 0");
  for (double c : {wrong_hh, wrong_vv, h_as_v, v_as_h}) {
    if (!(c >= 0.0)) raise(ErrorKind::ConfigError, "costs must be non-negative");
  }
  if (v_as_h < wrong_hh || v_as_h < wrong_vv || v_as_h < h_as_v) {
    raise(ErrorKind::ConfigError, "c_v_as_h must be at least every other cost");
  }
}

void Track1Weights::validate() const {
  if (!(f1 > 0.0 && venom_kept > 0.0 && harmless_kept > 0.0)) {
    raise(ErrorKind::ConfigError, "track1 weights must be positive");
  }
}

namespace {

void check_lengths(std::span<const ClassId> truth, std::span<const ClassId> pred) {
  if (truth.size() != pred.size()) {
    raise(ErrorKind::ShapeError,
          "truth has " + std::to_string(truth.size()) + " labels, pred has " + std::to_string(pred.size()));
  }
  if (truth.empty()) raise(ErrorKind::ShapeError, "metrics need at least one observation");
}

bool is_venomous(const VenomMap& venom, ClassId c) {
  auto it = venom.find(c);
  if (it == venom.end()) raise(ErrorKind::UnknownClass, "class_id " + std::to_string(c.value) + " has no venom flag");
  return it->second;
}

struct Kept {
  double venom = 1.0;
  double harmless = 1.0;
};

Kept venom_kept(std::span<const ClassId> truth, std::span<const ClassId> pred, const VenomMap& venom) {
  std::size_t v_total = 0, v_kept = 0, h_total = 0, h_kept = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool tv = is_venomous(venom, truth[i]);
    const bool pv = is_venomous(venom, pred[i]);
    if (tv) {
      ++v_total;
      v_kept += pv ? 1 : 0;
    } else {
      ++h_total;
      h_kept += pv ? 0 : 1;
    }
  }
  Kept k;
  if (v_total > 0) k.venom = static_cast<double>(v_kept) / static_cast<double>(v_total);
  if (h_total > 0) k.harmless = static_cast<double>(h_kept) / static_cast<double>(h_total);
  return k;
}

double track1_from(double f1, const Kept& kept, const Track1Weights& w) {
  return 100.0 * (w.f1 * f1 + w.venom_kept * kept.venom + w.harmless_kept * kept.harmless) /
         (w.f1 + w.venom_kept + w.harmless_kept);
}

}  // namespace

double macro_f1(std::span<const ClassId> truth, std::span<const ClassId> pred) {
  check_lengths(truth, pred);
  struct Counts {
    std::size_t tp = 0, fp = 0, fn = 0;
  };
  std::map<ClassId, Counts> per_class;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == pred[i]) {
      ++per_class[truth[i]].tp;
    } else {
      ++per_class[truth[i]].fn;
      ++per_class[pred[i]].fp;
    }
  }
  double sum = 0.0;
  for (const auto& [cls, c] : per_class) {
    const double p = c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    const double r = c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    sum += p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }
  return sum / static_cast<double>(per_class.size());
}

double accuracy(std::span<const ClassId> truth, std::span<const ClassId> pred) {
  check_lengths(truth, pred);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += truth[i] == pred[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

ConfusionBreakdown confusion_breakdown(std::span<const ClassId> truth, std::span<const ClassId> pred,
                                       const VenomMap& venom) {
  check_lengths(truth, pred);
  ConfusionBreakdown b;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool tv = is_venomous(venom, truth[i]);
    const bool pv = is_venomous(venom, pred[i]);
    if (truth[i] == pred[i]) {
      ++b.correct;
    } else if (tv && pv) {
      ++b.wrong_vv;
    } else if (!tv && !pv) {
      ++b.wrong_hh;
    } else if (tv) {
      ++b.v_as_h;
    } else {
      ++b.h_as_v;
    }
  }
  return b;
}

double track2_score(std::span<const ClassId> truth, std::span<const ClassId> pred, const VenomMap& venom,
                    const CostTable& costs) {
  const auto b = confusion_breakdown(truth, pred, venom);
  return costs.correct * static_cast<double>(b.correct) + costs.wrong_hh * static_cast<double>(b.wrong_hh) +
         costs.wrong_vv * static_cast<double>(b.wrong_vv) + costs.h_as_v * static_cast<double>(b.h_as_v) +
         costs.v_as_h * static_cast<double>(b.v_as_h);
}

double track1_score(std::span<const ClassId> truth, std::span<const ClassId> pred, const VenomMap& venom,
                    const Track1Weights& weights) {
  const double f1 = macro_f1(truth, pred);
  return track1_from(f1, venom_kept(truth, pred, venom), weights);
}

MetricReport metric_report(const Manifest& truth, const Submission& submission, const CostTable& costs,
                           const Track1Weights& weights, Split split) {
  costs.validate();
  weights.validate();
  std::unordered_map<ObservationId, ClassId> predicted;
  for (const auto& row : submission.rows) {
    if (!predicted.emplace(row.observation_id, row.class_id).second) {
      raise(ErrorKind::DuplicateObservation, "observation " + std::to_string(row.observation_id) + " repeated");
    }
  }
  auto observations = truth.observations(split);
  std::sort(observations.begin(), observations.end(),
            [](const Observation& a, const Observation& b) { return a.id < b.id; });
  std::vector<ClassId> t, p;
  for (const auto& obs : observations) {
    auto it = predicted.find(obs.id);
    if (it == predicted.end()) {
      raise(ErrorKind::MissingObservation, "submission has no row for observation " + std::to_string(obs.id));
    }
    t.push_back(obs.class_id);
    p.push_back(it->second);
    predicted.erase(it);
  }
  if (!predicted.empty()) {
    ObservationId extra = predicted.begin()->first;
    for (const auto& [id, cls] : predicted) extra = std::min(extra, id);
    raise(ErrorKind::ExtraObservation, "submission row for observation " + std::to_string(extra) +
                                           " which is not a " + std::string(split_name(split)) + " observation");
  }
  if (t.empty()) {
    raise(ErrorKind::MissingObservation, "manifest has no " + std::string(split_name(split)) + " observations");
  }

  const VenomMap venom = build_venom_map(truth);
  MetricReport r;
  r.costs = costs;
  r.weights = weights;
  r.observations = t.size();
  r.macro_f1 = macro_f1(t, p);
  r.accuracy = accuracy(t, p);
  const Kept kept = venom_kept(t, p, venom);
  r.venom_kept = kept.venom;
  r.harmless_kept = kept.harmless;
  r.track1 = track1_from(r.macro_f1, kept, weights);
  r.breakdown = confusion_breakdown(t, p, venom);
  r.track2 = track2_score(t, p, venom, costs);
  return r;
}

std::string report_json(const MetricReport& r) {
  nlohmann::json j;
  j["macro_f1"] = r.macro_f1;
  j["accuracy"] = r.accuracy;
  j["track1"] = r.track1;
  j["track2"] = r.track2;
  j["venom_kept"] = r.venom_kept;
  j["harmless_kept"] = r.harmless_kept;
  j["observations"] = r.observations;
  j["breakdown"] = {{"correct", r.breakdown.correct},
                    {"wrong_hh", r.breakdown.wrong_hh},
                    {"wrong_vv", r.breakdown.wrong_vv},
                    {"h_as_v", r.breakdown.h_as_v},
                    {"v_as_h", r.breakdown.v_as_h}};
  j["costs"] = {{"c_correct", r.costs.correct},
                {"c_wrong_hh", r.costs.wrong_hh},
                {"c_wrong_vv", r.costs.wrong_vv},
                {"c_h_as_v", r.costs.h_as_v},
                {"c_v_as_h", r.costs.v_as_h}};
  j["weights"] = {{"w_f1", r.weights.f1},
                  {"w_venom_kept", r.weights.venom_kept},
                  {"w_harmless_kept", r.weights.harmless_kept}};
  return j.dump(2) + "\n";
}

}  // namespace vitprobe
