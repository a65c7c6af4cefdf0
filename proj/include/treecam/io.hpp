#pragma once

// Structured-text serialization of configs, codebooks and reports.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "treecam/circuit.hpp"
#include "treecam/compiler.hpp"
#include "treecam/error.hpp"
#include "treecam/simulator.hpp"

namespace treecam {

using nlohmann::json;

#define TREECAM_TECH_FIELDS(X)                                                                              \
  X(r_lrs) X(r_hrs) X(r_on) X(r_off) X(c_in) X(v_dd) X(tau_pchg) X(t_sa) X(e_sa) X(t_mem) X(e_mem_bit)      \
      X(pipeline_interval) X(a_2t2r) X(a_sa) X(a_dff) X(a_sp) X(a_1t1r) X(a_sa2)

inline json to_json(const TechnologyParams& tp) {
  json j;
#define X(name) j[#name] = tp.name;
  TREECAM_TECH_FIELDS(X)
#undef X
  return j;
}

/// Missing fields keep their defaults; unknown fields are rejected.
inline TechnologyParams tech_from_json(const json& j) {
  if (!j.is_object()) throw InputError("technology config must be an object");
  TechnologyParams tp;
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
#define X(name)                                      \
  if (it.key() == #name) {                           \
    if (!it.value().is_number())                     \
      throw InputError("'" #name "' must be numeric"); \
    tp.name = it.value().get<double>();              \
    known = true;                                    \
  }
    TREECAM_TECH_FIELDS(X)
#undef X
    if (!known) throw InputError("unknown technology field '" + it.key() + "'");
  }
  tp.validate();
  return tp;
}

#undef TREECAM_TECH_FIELDS

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("'" + path + "': " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

inline json to_json(const FeatureCodebook& cb, const std::vector<std::string>& feature_names = {}) {
  json features = json::array();
  for (std::size_t f = 0; f < cb.features.size(); ++f) {
    const auto& fc = cb.features[f];
    json codes = json::array();
    for (std::size_t k = 1; k <= fc.width(); ++k) codes.push_back(fc.code(k));
    json entry{{"thresholds", fc.thresholds}, {"width", fc.width()}, {"codes", codes}};
    if (f < feature_names.size()) entry["name"] = feature_names[f];
    features.push_back(std::move(entry));
  }
  return {{"features", features}};
}

inline FeatureCodebook codebook_from_json(const json& j) {
  try {
    FeatureCodebook cb;
    for (const auto& f : j.at("features")) {
      FeatureCodes fc;
      fc.thresholds = f.at("thresholds").get<std::vector<double>>();
      if (!std::is_sorted(fc.thresholds.begin(), fc.thresholds.end()) ||
          std::adjacent_find(fc.thresholds.begin(), fc.thresholds.end()) != fc.thresholds.end())
        throw InputError("codebook thresholds must be strictly ascending");
      cb.features.push_back(std::move(fc));
    }
    return cb;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed codebook: ") + e.what());
  }
}

/// 64-bit FNV-1a, used to stamp artifacts with the config that produced them.
inline std::string config_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline json nullable(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

inline json to_json(const TileGeometry& g) {
  return {{"size", g.size},
          {"width", g.width},
          {"rows", g.rows},
          {"classes", g.classes},
          {"row_divisions", g.row_divisions},
          {"col_divisions", g.col_divisions},
          {"tiles", g.tiles()},
          {"class_bits", g.class_bits},
          {"rogue_rows", g.rogue_rows()},
          {"padding_columns", g.padding_columns()}};
}

inline json to_json(const SimReport& r) {
  return {{"mode", r.mode},
          {"selective_precharge", r.selective_precharge},
          {"pipelined", r.pipelined},
          {"geometry", to_json(r.geometry)},
          {"inputs", r.inputs},
          {"trials", r.trials},
          {"accuracy", r.accuracy},
          {"accuracy_std", r.accuracy_std},
          {"trial_accuracy", r.trial_accuracy},
          {"golden_accuracy", nullable(r.golden_accuracy)},
          {"accuracy_loss_pct", nullable(r.accuracy_loss)},
          {"golden_disagreements", r.golden_disagreements},
          {"energy_nj_per_dec", r.energy_per_dec * 1e9},
          {"latency_ns_per_dec", r.latency_per_dec * 1e9},
          {"f_max_hz", r.f_max},
          {"seq_throughput_dec_per_s", r.seq_throughput},
          {"pipe_throughput_dec_per_s", r.pipe_throughput},
          {"edp_js", r.edp},
          {"area_mm2", r.area_mm2},
          {"area_um2_per_bit", r.area_um2_per_bit},
          {"fom_js_mm2", r.fom},
          {"t_eval_s", r.t_eval},
          {"v_ref1", r.v_ref1},
          {"v_ref2", r.v_ref2},
          {"mean_active_rows", r.mean_active_rows},
          {"no_survivor", r.none_count},
          {"multi_survivor", r.multi_count}};
}

inline std::string fmt_num(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

inline constexpr const char* kReportCsvHeader =
    "mode,sp,pipelined,size,row_divisions,col_divisions,inputs,trials,accuracy,accuracy_std,golden_accuracy,"
    "accuracy_loss_pct,energy_nj,latency_ns,seq_throughput,pipe_throughput,edp_js,area_mm2,area_um2_per_bit,fom,"
    "no_survivor,multi_survivor,config_hash";

inline std::string report_csv_row(const SimReport& r, const std::string& hash = "") {
  std::ostringstream os;
  os << r.mode << ',' << (r.selective_precharge ? 1 : 0) << ',' << (r.pipelined ? 1 : 0) << ',' << r.geometry.size << ','
     << r.geometry.row_divisions << ',' << r.geometry.col_divisions << ',' << r.inputs << ',' << r.trials << ','
     << fmt_num(r.accuracy) << ',' << fmt_num(r.accuracy_std) << ',' << fmt_num(r.golden_accuracy) << ','
     << fmt_num(r.accuracy_loss) << ',' << fmt_num(r.energy_per_dec * 1e9) << ',' << fmt_num(r.latency_per_dec * 1e9)
     << ',' << fmt_num(r.seq_throughput) << ',' << fmt_num(r.pipe_throughput) << ',' << fmt_num(r.edp) << ','
     << fmt_num(r.area_mm2) << ',' << fmt_num(r.area_um2_per_bit) << ',' << fmt_num(r.fom) << ',' << r.none_count
     << ',' << r.multi_count << ',' << hash;
  return os.str();
}

inline constexpr const char* kSweepCsvHeader =
    "size,p_sa0,p_sa1,sigma_sa,sigma_in,trial,seed,accuracy,golden_accuracy,accuracy_loss_pct,energy_nj,latency_ns,"
    "edp_js,fom,col_divisions,row_divisions,config_hash";

/// Long format: one line per configuration per trial.
inline void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points, const std::string& hash = "") {
  os << kSweepCsvHeader << '\n';
  for (const auto& p : points) {
    const auto& r = p.report;
    for (std::size_t t = 0; t < r.trial_accuracy.size(); ++t) {
      const double loss = std::isnan(r.golden_accuracy) ? r.golden_accuracy : 100.0 * (r.golden_accuracy - r.trial_accuracy[t]);
      os << p.size << ',' << fmt_num(p.p_sa0) << ',' << fmt_num(p.p_sa1) << ',' << fmt_num(p.sigma_sa) << ','
         << fmt_num(p.sigma_in) << ',' << t << ',' << p.trial_seeds[t] << ',' << fmt_num(r.trial_accuracy[t]) << ','
         << fmt_num(r.golden_accuracy) << ',' << fmt_num(loss) << ',' << fmt_num(r.energy_per_dec * 1e9) << ','
         << fmt_num(r.latency_per_dec * 1e9) << ',' << fmt_num(r.edp) << ',' << fmt_num(r.fom) << ','
         << r.geometry.col_divisions << ',' << r.geometry.row_divisions << ',' << hash << '\n';
    }
  }
}

/// Feature columns at full precision, then a "label" column of class names.
inline void write_dataset_csv(std::ostream& os, const Dataset& d) {
  for (const auto& name : d.feature_names) os << name << ',';
  os << "label\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (double v : d.rows[i]) os << v << ',';
    os << d.class_names[static_cast<std::size_t>(d.labels[i])] << '\n';
  }
}

}  // namespace treecam
