// treecam command line: train, compile, map, simulate, sweep, report.
//
// Machine-readable outputs go to --out; short summaries go to stdout.
// Every run persists its effective configuration as config.toml, which can
// be passed back with --config.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "treecam/treecam.hpp"

namespace fs = std::filesystem;
using namespace treecam;

namespace {

// ---------------------------------------------------------------------------
// effective config and artifact stamping

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

/// TOML text of every option of `sub`, parsed or defaulted, under a
/// [name] section so it can be fed back through --config.
std::string effective_config(const CLI::App& sub) {
  std::ostringstream os;
  os << '[' << sub.get_name() << "]\n";
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    if (opt->get_expected_max() == 0) {
      os << name << " = " << (opt->count() > 0 ? "true" : "false") << '\n';
      continue;
    }
    std::vector<std::string> values = opt->count() > 0 ? opt->results() : std::vector<std::string>{};
    if (values.empty()) {
      const std::string def = opt->get_default_str();
      if (def.empty()) continue;
      values = {def};
    }
    if (values.size() == 1 && opt->get_expected_max() <= 1) {
      os << name << " = " << quote(values[0]) << '\n';
    } else {
      os << name << " = [";
      for (std::size_t i = 0; i < values.size(); ++i) os << (i ? ", " : "") << quote(values[i]);
      os << "]\n";
    }
  }
  return os.str();
}

struct Run {
  fs::path out;
  std::string hash;

  fs::path file(const std::string& name) const { return out / name; }

  void write(const std::string& name, const std::string& text) const { write_text_file(file(name).string(), text); }

  void write_json(const std::string& name, json j) const {
    j["config_hash"] = hash;
    write(name, j.dump(2) + "\n");
  }
};

Run start_run(const CLI::App& sub, const std::string& out, const TechnologyParams* tech = nullptr) {
  std::string config = effective_config(sub);
  if (tech) {
    config += "\n# technology\n";
    const json tj = to_json(*tech);
    for (const auto& [k, v] : tj.items()) config += "# " + k + " = " + v.dump() + "\n";
  }
  fs::create_directories(out);
  Run run{out, config_hash(config)};
  run.write("config.toml", "# config " + run.hash + "\n" + config);
  return run;
}

// ---------------------------------------------------------------------------
// shared inputs

struct DataOptions {
  std::string path;
  std::string label;
  bool no_header = false;
  double test_frac = 0.1;
  std::uint64_t seed = 0;
  std::size_t max_depth = 0;
  std::size_t min_samples_leaf = 1;
  std::size_t min_samples_split = 2;
};

void add_data_options(CLI::App* sub, DataOptions& d, bool required) {
  auto* opt = sub->add_option("--data", d.path, "CSV dataset; the last column is the label unless --label is given")
                  ->check(CLI::ExistingFile);
  if (required) opt->required();
  sub->add_option("--label", d.label, "label column name");
  sub->add_flag("--no-header", d.no_header, "first CSV line is data");
  sub->add_option("--test-frac", d.test_frac, "held-out fraction")->check(CLI::Range(0.0, 1.0));
  sub->add_option("--seed", d.seed, "split seed (also the default fault seed)");
  sub->add_option("--max-depth", d.max_depth, "CART depth limit, 0 for none");
  sub->add_option("--min-samples-leaf", d.min_samples_leaf, "CART minimum leaf size");
  sub->add_option("--min-samples-split", d.min_samples_split, "CART minimum node size to split");
}

CsvOptions csv_options(const DataOptions& d) {
  CsvOptions o;
  o.has_header = !d.no_header;
  if (!d.label.empty()) o.label_column = d.label;
  return o;
}

Dataset load_dataset(const std::string& path, const DataOptions& d) {
  auto load = load_csv(path, csv_options(d));
  if (load.dropped > 0) std::cout << "dropped " << load.dropped << " incomplete rows from " << path << '\n';
  return load.data;
}

struct Trained {
  DecisionTree tree;
  Dataset test;
  NormParams norm;
};

Trained train_from(const DataOptions& d) {
  const Dataset data = load_dataset(d.path, d);
  const auto parts = split(data, d.test_frac, d.seed);
  auto [train, norm] = normalize(parts.train);
  CartParams params;
  params.max_depth = d.max_depth;
  params.min_samples_leaf = d.min_samples_leaf;
  params.min_samples_split = d.min_samples_split;
  return {train_cart(train, params), apply_norm(parts.test, norm), norm};
}

DecisionTree load_tree(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_tree(ss.str());
}

/// Re-indexes labels to `names`; classes the model never saw get new indices
/// past the end, so they always count as misses.
Dataset align_labels(Dataset d, std::vector<std::string> names) {
  std::vector<int> remap;
  for (const auto& n : d.class_names) {
    auto it = std::find(names.begin(), names.end(), n);
    if (it == names.end()) {
      names.push_back(n);
      it = names.end() - 1;
    }
    remap.push_back(static_cast<int>(it - names.begin()));
  }
  for (auto& l : d.labels) l = remap[static_cast<std::size_t>(l)];
  d.class_names = std::move(names);
  return d;
}

TechnologyParams load_tech(const std::string& path) {
  if (path.empty()) return {};
  return tech_from_json(read_json_file(path));
}

struct SizeOptions {
  std::size_t size = 0;
  double dlimit = 0.0;
  std::uint64_t map_seed = 0;
  bool unmasked_padding = false;
};

void add_size_options(CLI::App* sub, SizeOptions& s, const std::string& seed_flag) {
  auto* size = sub->add_option("--size", s.size, "tile size S")->check(CLI::Range(2, 1 << 16));
  auto* dl = sub->add_option("--dlimit", s.dlimit, "dynamic-range limit in volts; S is the largest power of two meeting it");
  size->excludes(dl);
  sub->add_option(seed_flag, s.map_seed, "seed for rogue-row class codes");
  sub->add_flag("--unmasked-padding", s.unmasked_padding, "store extension columns as x cells instead of masking them");
}

std::size_t resolve_size(const SizeOptions& s, const TechnologyParams& tp) {
  if (s.size > 0) return s.size;
  if (s.dlimit <= 0.0) throw InputError("one of --size or --dlimit is required");
  const std::size_t max_cells = max_row_size(s.dlimit, tp);
  const std::size_t chosen = power_of_two_size(max_cells);
  if (chosen < 2) throw InputError("no tile size meets D_limit " + fmt_num(s.dlimit) + " V");
  std::cout << "D_limit " << s.dlimit << " V: max row size " << max_cells << ", chosen S = " << chosen << '\n';
  return chosen;
}

MapOptions map_options(const SizeOptions& s) { return {.seed = s.map_seed, .masked_padding = !s.unmasked_padding}; }

std::string write_lut_text(const TernaryLUT& lut, const std::string& hash) {
  std::ostringstream os;
  os << "# config " << hash << '\n';
  write_lut(os, lut);
  return os.str();
}

json codebook_document(const TernaryLUT& lut, const DecisionTree& tree) {
  json j = to_json(lut.codebook, tree.feature_names);
  j["feature_names"] = tree.feature_names;
  j["class_names"] = tree.class_names;
  return j;
}

void print_geometry(const TileGeometry& g) {
  std::cout << "S = " << g.size << ": " << g.row_divisions << "x" << g.col_divisions << " tiles (" << g.tiles()
            << "), " << g.rogue_rows() << " rogue rows, " << g.padding_columns() << " padding columns\n";
}

// ---------------------------------------------------------------------------
// simulation options

struct SimOptions {
  std::string mode = "auto";
  bool no_sp = false;
  bool pipelined = false;
  std::size_t trials = 1;
  std::size_t threads = 0;
  std::optional<std::uint64_t> fault_seed;
  std::string tech;
};

void add_sim_options(CLI::App* sub, SimOptions& s) {
  sub->add_option("--mode", s.mode, "sensing model: ideal, analog, or auto (analog when sigma-sa > 0)")
      ->check(CLI::IsMember({"auto", "ideal", "analog"}));
  sub->add_flag("--no-sp", s.no_sp, "disable selective precharge");
  sub->add_flag("--pipelined", s.pipelined, "report EDP/FOM for the pipelined organisation");
  sub->add_option("--trials", s.trials, "Monte Carlo trials per configuration")->check(CLI::PositiveNumber);
  sub->add_option("--threads", s.threads, "worker threads, 0 for all cores");
  sub->add_option("--fault-seed", s.fault_seed, "master seed for fault injection (defaults to --seed)");
  sub->add_option("--tech", s.tech, "technology JSON; missing fields keep their defaults")->check(CLI::ExistingFile);
}

SimConfig sim_config(const SimOptions& s, std::uint64_t seed, bool any_sigma_sa) {
  SimConfig cfg;
  if (s.mode == "analog" || (s.mode == "auto" && any_sigma_sa))
    cfg.mode = SenseMode::kAnalog;
  else
    cfg.mode = SenseMode::kIdeal;
  if (cfg.mode == SenseMode::kIdeal && any_sigma_sa) throw InputError("--sigma-sa needs analog sensing");
  cfg.selective_precharge = !s.no_sp;
  cfg.pipelined = s.pipelined;
  cfg.trials = s.trials;
  cfg.threads = s.threads;
  cfg.faults.seed = s.fault_seed.value_or(seed);
  return cfg;
}

json report_document(const SimReport& r, const SimConfig& cfg) {
  json j = to_json(r);
  j["faults"] = {{"p_sa0", cfg.faults.p_sa0},
                 {"p_sa1", cfg.faults.p_sa1},
                 {"sigma_sa", cfg.faults.sigma_sa},
                 {"sigma_in", cfg.faults.sigma_in},
                 {"seed", cfg.faults.seed}};
  json seeds = json::array();
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const auto s = trial_seeds(cfg.faults.seed, t);
    seeds.push_back({{"saf", s.saf}, {"sa", s.sa}, {"input", s.input}});
  }
  j["trial_seeds"] = seeds;
  return j;
}

void print_report(const SimReport& r) {
  std::cout << std::setprecision(6);
  std::cout << r.mode << " sensing, SP " << (r.selective_precharge ? "on" : "off") << ", S = " << r.geometry.size << " ("
            << r.geometry.row_divisions << "x" << r.geometry.col_divisions << " tiles), " << r.inputs << " inputs x "
            << r.trials << " trials\n";
  std::cout << "  accuracy " << r.accuracy;
  if (r.trials > 1) std::cout << " +/- " << r.accuracy_std;
  if (!std::isnan(r.golden_accuracy))
    std::cout << " (golden " << r.golden_accuracy << ", loss " << r.accuracy_loss << " pp)";
  std::cout << '\n';
  std::cout << "  energy " << r.energy_per_dec * 1e9 << " nJ/dec, latency " << r.latency_per_dec * 1e9 << " ns, "
            << "throughput " << r.seq_throughput << " dec/s seq, " << r.pipe_throughput << " dec/s pipelined\n";
  std::cout << "  EDP " << r.edp << " J*s, area " << r.area_mm2 << " mm^2 (" << r.area_um2_per_bit
            << " um^2/bit), FOM " << r.fom << " J*s*mm^2\n";
  if (r.none_count + r.multi_count > 0)
    std::cout << "  anomalies: " << r.none_count << " without survivor, " << r.multi_count << " with several\n";
}

// ---------------------------------------------------------------------------
// subcommands

int cmd_train(const CLI::App& sub, const DataOptions& d, const std::string& out) {
  const Run run = start_run(sub, out);
  const Trained t = train_from(d);
  json doc = export_tree(t.tree);
  doc["normalization"] = {{"min", t.norm.min}, {"max", t.norm.max}};
  run.write_json("tree.json", doc);
  std::ostringstream test;
  test << "# config " << run.hash << '\n';
  write_dataset_csv(test, t.test);
  run.write("test.csv", test.str());
  std::cout << "tree: " << t.tree.num_leaves() << " leaves, depth " << t.tree.depth() << '\n';
  std::cout << "golden accuracy " << accuracy(t.tree, t.test) << " on " << t.test.size() << " held-out rows\n";
  return 0;
}

int cmd_compile(const CLI::App& sub, const std::string& tree_path, const std::string& out) {
  const Run run = start_run(sub, out);
  const DecisionTree tree = load_tree(tree_path);
  const TernaryLUT lut = compile_tree(tree);
  run.write("lut.txt", write_lut_text(lut, run.hash));
  run.write_json("codebook.json", codebook_document(lut, tree));
  std::cout << "LUT: " << lut.num_rows() << " rows x " << lut.width() << " bits (" << lut.n_total() << " total), "
            << lut.num_classes() << " classes\n";
  return 0;
}

int cmd_map(const CLI::App& sub, const std::string& lut_path, const SizeOptions& so, const std::string& tech_path,
            const std::string& out) {
  const TechnologyParams tp = load_tech(tech_path);
  const Run run = start_run(sub, out, &tp);
  std::ifstream in(lut_path);
  if (!in) throw InputError("cannot open '" + lut_path + "'");
  const TernaryLUT lut = read_lut(in);
  const std::size_t s = resolve_size(so, tp);
  const TileSet ts = map_lut(lut, s, map_options(so));
  std::ostringstream os;
  os << "# config " << run.hash << '\n';
  write_tiles(os, ts);
  run.write("tiles.txt", os.str());
  json geo = to_json(ts.geometry());
  geo["d_cap_volts"] = dynamic_range_cap(s, tp);
  geo["masked_padding"] = !so.unmasked_padding;
  if (so.dlimit > 0.0) {
    geo["d_limit_volts"] = so.dlimit;
    geo["max_row_size"] = max_row_size(so.dlimit, tp);
  }
  run.write_json("geometry.json", geo);
  print_geometry(ts.geometry());
  return 0;
}

struct FaultOptions {
  double saf = 0.0;  // percent, SA0 = SA1
  double p_sa0 = 0.0;
  double p_sa1 = 0.0;
  double sigma_sa = 0.0;
  double sigma_in = 0.0;
};

struct SimulateInputs {
  DataOptions data;
  SizeOptions size;
  SimOptions sim;
  FaultOptions faults;
  std::string tiles, codebook, tree, test;
  bool compare_sp = false;
  bool dump_active = false;
};

int cmd_simulate(const CLI::App& sub, const SimulateInputs& in, const std::string& out) {
  const TechnologyParams tp = load_tech(in.sim.tech);
  const Run run = start_run(sub, out, &tp);

  Hardware hw;
  hw.tech = tp;
  Dataset test;
  std::vector<std::string> class_names;
  if (!in.tiles.empty()) {
    if (in.codebook.empty() || in.test.empty()) throw InputError("--tiles needs --codebook and --test");
    std::ifstream tin(in.tiles);
    if (!tin) throw InputError("cannot open '" + in.tiles + "'");
    hw.tiles = read_tiles(tin);
    const json cb = read_json_file(in.codebook);
    hw.codebook = codebook_from_json(cb);
    if (cb.contains("class_names")) class_names = cb["class_names"].get<std::vector<std::string>>();
    if (!in.tree.empty()) hw.tree = load_tree(in.tree);
    if (hw.tree) class_names = hw.tree->class_names;
    test = load_dataset(in.test, in.data);
  } else {
    TernaryLUT lut;
    if (!in.data.path.empty()) {
      if (!in.tree.empty()) throw InputError("use either --data or --tree, not both");
      Trained t = train_from(in.data);
      hw.tree = std::move(t.tree);
      test = std::move(t.test);
    } else if (!in.tree.empty()) {
      if (in.test.empty()) throw InputError("--tree needs --test");
      hw.tree = load_tree(in.tree);
      test = load_dataset(in.test, in.data);
    } else {
      throw InputError("no input: give --data, --tree with --test, or --tiles");
    }
    class_names = hw.tree->class_names;
    lut = compile_tree(*hw.tree);
    hw.codebook = lut.codebook;
    hw.tiles = map_lut(lut, resolve_size(in.size, tp), map_options(in.size));
  }
  if (!class_names.empty()) test = align_labels(std::move(test), class_names);

  SimConfig cfg = sim_config(in.sim, in.data.seed, in.faults.sigma_sa > 0.0);
  const bool coupled = in.faults.saf > 0.0;
  cfg.faults.p_sa0 = coupled ? in.faults.saf / 100.0 : in.faults.p_sa0;
  cfg.faults.p_sa1 = coupled ? in.faults.saf / 100.0 : in.faults.p_sa1;
  cfg.faults.sigma_sa = in.faults.sigma_sa;
  cfg.faults.sigma_in = in.faults.sigma_in;

  const SimReport rep = run_inference(hw, test, cfg);
  run.write_json("report.json", report_document(rep, cfg));
  run.write("report.csv", std::string(kReportCsvHeader) + "\n" + report_csv_row(rep, run.hash) + "\n");
  print_report(rep);

  if (in.compare_sp) {
    SimConfig other = cfg;
    other.selective_precharge = !cfg.selective_precharge;
    const SimReport alt = run_inference(hw, test, other);
    run.write_json(other.selective_precharge ? "report_sp.json" : "report_no_sp.json", report_document(alt, other));
    const SimReport& with = cfg.selective_precharge ? rep : alt;
    const SimReport& without = cfg.selective_precharge ? alt : rep;
    std::cout << "EDP with SP " << with.edp << " J*s, without SP " << without.edp << " J*s, reduction "
              << 100.0 * (1.0 - with.edp / without.edp) << "%\n";
  }

  if (in.dump_active) {
    // Trial 0 with the same seeds as the report.
    const auto seeds = trial_seeds(cfg.faults.seed, 0);
    FaultConfig fc = cfg.faults;
    fc.seed = seeds.saf;
    const Engine engine(inject_saf(hw.tiles, fc), tp, cfg, sample_sa_offsets(hw.tiles.geometry(), fc.sigma_sa, seeds.sa));
    const Dataset noisy = perturb_inputs(test, cfg.faults.sigma_in, seeds.input);
    std::ostringstream os;
    os << "input";
    for (std::size_t k = 0; k < hw.tiles.geometry().col_divisions; ++k) os << ",division_" << k;
    os << ",predicted,label,config_hash\n";
    for (std::size_t i = 0; i < noisy.size(); ++i) {
      const auto r = engine.run(encode_input(noisy.rows[i], hw.codebook));
      os << i;
      for (auto a : r.active_rows) os << ',' << a;
      os << ',' << r.predicted << ',' << noisy.labels[i] << ',' << run.hash << '\n';
    }
    run.write("active_rows.csv", os.str());
  }
  return 0;
}

struct SweepInputs {
  DataOptions data;
  SimOptions sim;
  std::string tree, test;
  std::vector<std::size_t> sizes;
  std::vector<double> saf{0.0};
  std::vector<double> sigma_sa{0.0};
  std::vector<double> sigma_in{0.0};
  std::uint64_t map_seed = 0;
  bool unmasked_padding = false;
};

int cmd_sweep(const CLI::App& sub, const SweepInputs& in, const std::string& out) {
  const TechnologyParams tp = load_tech(in.sim.tech);
  const Run run = start_run(sub, out, &tp);

  DecisionTree tree;
  Dataset test;
  if (!in.data.path.empty()) {
    if (!in.tree.empty()) throw InputError("use either --data or --tree, not both");
    Trained t = train_from(in.data);
    tree = std::move(t.tree);
    test = std::move(t.test);
  } else if (!in.tree.empty() && !in.test.empty()) {
    tree = load_tree(in.tree);
    test = load_dataset(in.test, in.data);
  } else {
    throw InputError("no input: give --data, or --tree with --test");
  }
  test = align_labels(std::move(test), tree.class_names);
  const TernaryLUT lut = compile_tree(tree);

  const bool any_sigma_sa = std::any_of(in.sigma_sa.begin(), in.sigma_sa.end(), [](double v) { return v > 0.0; });
  const SimConfig base = sim_config(in.sim, in.data.seed, any_sigma_sa);
  SweepGrid grid;
  grid.sizes = in.sizes;
  grid.p_sa0.clear();
  for (double pct : in.saf) grid.p_sa0.push_back(pct / 100.0);
  grid.coupled_saf = true;
  grid.sigma_sa = in.sigma_sa;
  grid.sigma_in = in.sigma_in;
  const auto points = sweep(lut, tree, test, tp, base, grid, {.seed = in.map_seed, .masked_padding = !in.unmasked_padding});

  std::ostringstream csv;
  write_sweep_csv(csv, points, run.hash);
  run.write("sweep.csv", csv.str());
  json doc;
  doc["points"] = json::array();
  for (const auto& p : points) {
    SimConfig cfg = base;
    cfg.faults.p_sa0 = p.p_sa0;
    cfg.faults.p_sa1 = p.p_sa1;
    cfg.faults.sigma_sa = p.sigma_sa;
    cfg.faults.sigma_in = p.sigma_in;
    json j = report_document(p.report, cfg);
    j["faults"].erase("seed");
    j["trial_master_seeds"] = p.trial_seeds;
    j.erase("trial_seeds");
    doc["points"].push_back(std::move(j));
  }
  doc["master_seed"] = base.faults.seed;
  run.write_json("sweep.json", doc);

  std::cout << points.size() << " configurations x " << base.trials << " trials\n";
  std::cout << "     S   SAF%  sigma_sa  sigma_in   accuracy   loss_pp  energy_nJ\n";
  for (const auto& p : points) {
    char line[160];
    std::snprintf(line, sizeof line, "%6zu %6.2f %9.3f %9.3f %10.4f %9.3f %10.5f\n", p.size, p.p_sa0 * 100.0,
                  p.sigma_sa, p.sigma_in, p.report.accuracy, p.report.accuracy_loss, p.report.energy_per_dec * 1e9);
    std::cout << line;
  }
  return 0;
}

// Flattened view of one simulated configuration for the report tables.
struct Record {
  std::string source;
  json report;
};

std::vector<Record> collect_records(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InputError("'" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (e.is_regular_file() && (name == "sweep.json" || name.rfind("report", 0) == 0) && e.path().extension() == ".json")
      files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Record> out;
  for (const auto& f : files) {
    const json j = read_json_file(f.string());
    const std::string source = fs::relative(f, dir).generic_string();
    if (j.contains("points")) {
      for (const auto& p : j["points"]) {
        json r = p;
        r["config_hash"] = j.value("config_hash", "");
        out.push_back({source, std::move(r)});
      }
    } else if (j.contains("geometry")) {
      out.push_back({source, j});
    }
  }
  if (out.empty()) throw InputError("no simulation reports under '" + dir.string() + "'");
  return out;
}

std::string num(const json& v) { return v.is_null() ? "" : fmt_num(v.get<double>()); }

int cmd_report(const CLI::App& sub, const std::string& run_dir, const std::string& out) {
  const auto records = collect_records(run_dir);
  const Run run = start_run(sub, out);

  std::ostringstream et, edp, fomt, loss;
  et << "source,size,sp,pipelined,p_sa0,sigma_sa,sigma_in,energy_nj,latency_ns,seq_throughput,pipe_throughput,config_hash\n";
  edp << "source,size,sp,pipelined,p_sa0,sigma_sa,sigma_in,edp_js,config_hash\n";
  fomt << "source,size,tiles,area_mm2,area_um2_per_bit,fom,config_hash\n";
  loss << "source,size,p_sa0,p_sa1,sigma_sa,sigma_in,trials,accuracy,accuracy_std,golden_accuracy,accuracy_loss_pct,config_hash\n";
  for (const auto& rec : records) {
    const json& r = rec.report;
    const json& f = r.at("faults");
    const std::string size = std::to_string(r.at("geometry").at("size").get<std::size_t>());
    const std::string sp = r.at("selective_precharge").get<bool>() ? "1" : "0";
    const std::string pipe = r.at("pipelined").get<bool>() ? "1" : "0";
    const std::string hash = r.value("config_hash", "");
    const std::string faults = num(f.at("p_sa0")) + ',' + num(f.at("sigma_sa")) + ',' + num(f.at("sigma_in"));
    et << rec.source << ',' << size << ',' << sp << ',' << pipe << ',' << faults << ',' << num(r.at("energy_nj_per_dec"))
       << ',' << num(r.at("latency_ns_per_dec")) << ',' << num(r.at("seq_throughput_dec_per_s")) << ','
       << num(r.at("pipe_throughput_dec_per_s")) << ',' << hash << '\n';
    edp << rec.source << ',' << size << ',' << sp << ',' << pipe << ',' << faults << ',' << num(r.at("edp_js")) << ','
        << hash << '\n';
    fomt << rec.source << ',' << size << ',' << r.at("geometry").at("tiles").get<std::size_t>() << ','
         << num(r.at("area_mm2")) << ',' << num(r.at("area_um2_per_bit")) << ',' << num(r.at("fom_js_mm2")) << ','
         << hash << '\n';
    loss << rec.source << ',' << size << ',' << num(f.at("p_sa0")) << ',' << num(f.at("p_sa1")) << ','
         << num(f.at("sigma_sa")) << ',' << num(f.at("sigma_in")) << ',' << r.at("trials").get<std::size_t>() << ','
         << num(r.at("accuracy")) << ',' << num(r.at("accuracy_std")) << ',' << num(r.at("golden_accuracy")) << ','
         << num(r.at("accuracy_loss_pct")) << ',' << hash << '\n';
  }
  run.write("energy_throughput.csv", et.str());
  run.write("edp.csv", edp.str());
  run.write("fom.csv", fomt.str());
  run.write("accuracy_loss.csv", loss.str());
  std::cout << records.size() << " configurations -> energy_throughput.csv, edp.csv, fom.csv, accuracy_loss.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compile decision trees to ternary CAM tables and simulate them on resistive TCAM tiles"};
  app.set_config("--config", "", "TOML config; command-line flags override it");
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  std::string out;

  DataOptions train_data;
  auto* train = app.add_subcommand("train", "train a CART tree and write tree.json and test.csv");
  add_data_options(train, train_data, true);
  train->add_option("--out", out, "output directory")->required();

  std::string tree_path;
  auto* compile = app.add_subcommand("compile", "compile tree.json into lut.txt and codebook.json");
  compile->add_option("--tree", tree_path, "tree interchange file")->required()->check(CLI::ExistingFile);
  compile->add_option("--out", out, "output directory")->required();

  std::string lut_path;
  std::string map_tech;
  SizeOptions map_size;
  auto* map = app.add_subcommand("map", "place lut.txt onto S x S tiles");
  map->add_option("--lut", lut_path, "LUT dump")->required()->check(CLI::ExistingFile);
  add_size_options(map, map_size, "--seed");
  map->add_option("--tech", map_tech, "technology JSON")->check(CLI::ExistingFile);
  map->add_option("--out", out, "output directory")->required();

  SimulateInputs sim_in;
  auto* simulate = app.add_subcommand("simulate", "run a test set through a mapped array");
  add_data_options(simulate, sim_in.data, false);
  add_size_options(simulate, sim_in.size, "--map-seed");
  add_sim_options(simulate, sim_in.sim);
  simulate->add_option("--tiles", sim_in.tiles, "tile dump from 'map'")->check(CLI::ExistingFile);
  simulate->add_option("--codebook", sim_in.codebook, "codebook.json from 'compile'")->check(CLI::ExistingFile);
  simulate->add_option("--tree", sim_in.tree, "tree interchange file")->check(CLI::ExistingFile);
  simulate->add_option("--test", sim_in.test, "normalized test CSV")->check(CLI::ExistingFile);
  auto* saf = simulate->add_option("--saf", sim_in.faults.saf, "stuck-at rate in percent, applied as SA0 = SA1");
  simulate->add_option("--p-sa0", sim_in.faults.p_sa0, "stuck-at-HRS probability")->excludes(saf);
  simulate->add_option("--p-sa1", sim_in.faults.p_sa1, "stuck-at-LRS probability")->excludes(saf);
  simulate->add_option("--sigma-sa", sim_in.faults.sigma_sa, "SA offset std-dev in volts");
  simulate->add_option("--sigma-in", sim_in.faults.sigma_in, "input noise std-dev");
  simulate->add_flag("--compare-sp", sim_in.compare_sp, "also run with selective precharge toggled and compare EDP");
  simulate->add_flag("--dump-active", sim_in.dump_active, "write per-input active-row counts for trial 0");
  simulate->add_option("--out", out, "output directory")->required();

  SweepInputs sweep_in;
  auto* sweep_cmd = app.add_subcommand("sweep", "grid over tile size and non-idealities");
  add_data_options(sweep_cmd, sweep_in.data, false);
  add_sim_options(sweep_cmd, sweep_in.sim);
  sweep_cmd->add_option("--tree", sweep_in.tree, "tree interchange file")->check(CLI::ExistingFile);
  sweep_cmd->add_option("--test", sweep_in.test, "normalized test CSV")->check(CLI::ExistingFile);
  sweep_cmd->add_option("--sizes", sweep_in.sizes, "tile sizes")->required()->delimiter(',');
  sweep_cmd->add_option("--saf", sweep_in.saf, "stuck-at rates in percent (SA0 = SA1)")->delimiter(',');
  sweep_cmd->add_option("--sigma-sa", sweep_in.sigma_sa, "SA offset std-devs in volts")->delimiter(',');
  sweep_cmd->add_option("--sigma-in", sweep_in.sigma_in, "input noise std-devs")->delimiter(',');
  sweep_cmd->add_option("--map-seed", sweep_in.map_seed, "seed for rogue-row class codes");
  sweep_cmd->add_flag("--unmasked-padding", sweep_in.unmasked_padding, "store extension columns as x cells");
  sweep_cmd->add_option("--out", out, "output directory")->required();

  std::string run_dir;
  auto* report = app.add_subcommand("report", "tabulate the reports of earlier runs");
  report->add_option("--run", run_dir, "directory holding report.json / sweep.json files")->required();
  report->add_option("--out", out, "output directory")->required();

  for (auto* sub : app.get_subcommands({})) sub->configurable();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*train) return cmd_train(*train, train_data, out);
    if (*compile) return cmd_compile(*compile, tree_path, out);
    if (*map) return cmd_map(*map, lut_path, map_size, map_tech, out);
    if (*simulate) return cmd_simulate(*simulate, sim_in, out);
    if (*sweep_cmd) return cmd_sweep(*sweep_cmd, sweep_in, out);
    if (*report) return cmd_report(*report, run_dir, out);
  } catch (const std::exception& e) {
    std::cerr << "treecam: error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
