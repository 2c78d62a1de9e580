// reapnvm: command-line driver producing the data behind every endurance,
// quality-metric and attack experiment as CSV/JSON files.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <reapnvm/attack.hpp>
#include <reapnvm/chain_model.hpp>
#include <reapnvm/lifetime.hpp>
#include <reapnvm/metrics.hpp>
#include <reapnvm/occupancy.hpp>
#include <reapnvm/presets.hpp>
#include <reapnvm/puf_sim.hpp>

#include "json_config.hpp"

namespace fs = std::filesystem;
using namespace reapnvm;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

// ---------------------------------------------------------------------------
// Output

struct Output {
  fs::path dir = "out";

  /// Writes via a temporary file and rename so readers never see a partial
  /// file.
  void write(const std::string& name, const std::string& content) const {
    fs::create_directories(dir);
    const auto target = dir / name;
    auto tmp = target;
    tmp += ".tmp";
    {
      std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
      if (!os) throw ValidationError("cannot write " + tmp.string());
      os << content;
      if (!os.flush()) throw ValidationError("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
    std::cout << "wrote " << target.string() << '\n';
  }

  void write_json(const std::string& name, const nlohmann::ordered_json& j) const { write(name, j.dump(2) + "\n"); }
};

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string fmt(double x, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << x;
  return os.str();
}

// ---------------------------------------------------------------------------
// Chain selection shared by analyze, lifetime and export-chain

struct ChainOptions {
  std::vector<std::string> pufs;
  std::vector<std::string> chain_files;
  std::string set_model = "geometric";
  ChainParams params;
  bool calibrated = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--puf", pufs, "Built-in chain: reap-nvm or a-mpuf (repeatable)")
        ->check(CLI::IsMember({"reap-nvm", "a-mpuf"}));
    cmd->add_option("--chain", chain_files, "Chain-spec JSON file (repeatable)")->check(CLI::ExistingFile);
    cmd->add_option("--set-model", set_model, "Set-loop expansion for built-ins")
        ->check(CLI::IsMember({"geometric", "level"}))
        ->capture_default_str();
    cmd->add_option("--n-pairs", params.n_pairs, "Cell pairs")->capture_default_str();
    cmd->add_option("--n-levels", params.n_levels, "MLC levels")->capture_default_str();
    cmd->add_option("--mean-set-pulses", params.mean_set_pulses, "Geometric set-loop mean")->capture_default_str();
    cmd->add_option("--reset-pulses", params.reset_pulses, "Mean reset visits")->capture_default_str();
    cmd->add_option("--pulse-success", params.pulse_success, "Level-expanded per-pulse success")
        ->capture_default_str();
    cmd->add_flag("--calibrated", calibrated, "Use the calibrated level-expanded presets");
  }

  std::vector<std::pair<std::string, MarkovChainSpec>> resolve() const {
    std::vector<std::pair<std::string, MarkovChainSpec>> out;
    for (const auto& name : pufs) {
      const auto puf = builtin_puf_from_string(name);
      ChainParams p = params;
      p.set_model = set_model == "level" ? SetModel::LevelExpanded : SetModel::Geometric;
      if (calibrated) p = calibrated_params(puf);
      out.emplace_back(name, build_chain(puf, p));
    }
    for (const auto& file : chain_files) out.emplace_back(fs::path(file).stem().string(), load_chain(read_file(file)));
    if (out.empty()) throw ValidationError("select a chain with --puf or --chain");
    return out;
  }
};

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeOptions {
  ChainOptions chain;
  double epsilon = kDefaultEpsilon;
  double oracle = 0;
  std::uint64_t seed = 1;
  std::string recursion = "joint";
};

std::string csv_with_oracle(const CountDistribution& analytic, const CountDistribution& mc) {
  std::ostringstream os;
  os.precision(17);
  os << "count,probability,mc_probability\n";
  const auto n = std::max(analytic.pmf.size(), mc.pmf.size());
  for (std::size_t k = 0; k < n; ++k) os << k << ',' << analytic.at(k) << ',' << mc.at(k) << '\n';
  return os.str();
}

int run_analyze(const AnalyzeOptions& o, const Output& out) {
  const auto method = o.recursion == "factorized" ? VisitRecursion::Factorized : VisitRecursion::Joint;
  for (const auto& [name, chain] : o.chain.resolve()) {
    const auto ops = per_challenge_ops(chain, o.epsilon, method);
    nlohmann::ordered_json j;
    j["chain"] = name;
    j["epsilon"] = o.epsilon;
    j["recursion"] = o.recursion;
    j["converged_at"] = evolve(chain, o.epsilon).converged_at;
    j["mean_set"] = ops.set_dist.mean();
    j["mean_reset"] = ops.reset_dist.mean();
    j["set"] = to_json(ops.set_dist);
    j["reset"] = to_json(ops.reset_dist);
    j["combined"] = to_json(ops.combined_dist);
    if (o.oracle >= 1) {
      const auto n = static_cast<std::uint64_t>(o.oracle);
      const auto mc = sample_trajectories(chain, n, o.seed);
      j["oracle"] = {{"trajectories", n},
                     {"seed", o.seed},
                     {"tv_set", total_variation(ops.set_dist, mc.set_dist)},
                     {"tv_reset", total_variation(ops.reset_dist, mc.reset_dist)},
                     {"tv_combined", total_variation(ops.combined_dist, mc.combined_dist)}};
      out.write(name + "_set.csv", csv_with_oracle(ops.set_dist, mc.set_dist));
      out.write(name + "_reset.csv", csv_with_oracle(ops.reset_dist, mc.reset_dist));
      out.write(name + "_combined.csv", csv_with_oracle(ops.combined_dist, mc.combined_dist));
      std::cout << name << ": TV(set)=" << fmt(j["oracle"]["tv_set"].get<double>())
                << " TV(reset)=" << fmt(j["oracle"]["tv_reset"].get<double>()) << '\n';
    } else {
      out.write(name + "_set.csv", to_csv(ops.set_dist));
      out.write(name + "_reset.csv", to_csv(ops.reset_dist));
      out.write(name + "_combined.csv", to_csv(ops.combined_dist));
    }
    out.write_json(name + "_ops.json", j);
    std::cout << name << ": mean set ops " << fmt(ops.set_dist.mean()) << ", mean reset ops "
              << fmt(ops.reset_dist.mean()) << " per challenge per cell\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// lifetime

struct LifetimeOptions {
  ChainOptions chain;
  std::vector<std::string> modes{"set"};
  LifetimeParams params;
  double grid_max = 1e7;
  double grid_factor = 1.2;
  double epsilon = kDefaultEpsilon;
};

int run_lifetime(const LifetimeOptions& o, const Output& out) {
  const auto chains = o.chain.resolve();
  std::vector<LifetimeMode> modes;
  for (const auto& m : o.modes) {
    if (m == "all") {
      modes = {LifetimeMode::SetOnly, LifetimeMode::ResetOnly, LifetimeMode::Combined, LifetimeMode::EitherExceeds};
      break;
    }
    modes.push_back(lifetime_mode_from_string(m));
  }
  const auto grid = default_grid(o.grid_factor, static_cast<std::uint64_t>(o.grid_max));

  std::map<std::string, std::map<std::string, std::uint64_t>> table;
  std::ostringstream csv;
  csv << "PUF type";
  for (auto m : modes) {
    std::string label(to_string(m));
    label[0] = static_cast<char>(std::toupper(label[0]));
    csv << ",Half-life (" << label << ")";
  }
  csv << '\n';
  nlohmann::ordered_json summary;
  summary["params"] = {{"endurance_limit", o.params.endurance_limit},
                       {"cell_count", o.params.cell_count},
                       {"dead_fraction", o.params.dead_fraction}};
  for (const auto& [name, chain] : chains) {
    const auto ops = per_challenge_ops(chain, o.epsilon);
    csv << name;
    for (auto m : modes) {
      auto params = o.params;
      params.mode = m;
      LifetimeModel model(ops, params);
      auto curve = lifetime_curve(model, grid);
      refine_crossing(model, curve);
      const double hl = half_life(curve);  // throws when the grid is too short
      const std::string tag = name + "_lifetime_" + std::string(to_string(m));
      out.write(tag + ".csv", to_csv(curve));
      auto j = to_json(curve);
      const auto first = std::find_if(curve.p_dead.begin(), curve.p_dead.end(), [](double p) { return p >= 0.5; });
      const auto hl_int = curve.challenge_grid[static_cast<std::size_t>(first - curve.p_dead.begin())];
      j["half_life"] = hl;
      j["half_life_challenges"] = hl_int;
      out.write_json(tag + ".json", j);
      table[name][std::string(to_string(m))] = hl_int;
      summary["half_life"][name][std::string(to_string(m))] = hl_int;
      csv << ',' << hl_int;
      std::cout << name << " (" << to_string(m) << "): half-life " << hl_int << " challenges\n";
    }
    csv << '\n';
  }
  if (table.count("reap-nvm") && table.count("a-mpuf")) {
    for (auto m : modes) {
      const std::string key(to_string(m));
      const double ratio = static_cast<double>(table["reap-nvm"][key]) / static_cast<double>(table["a-mpuf"][key]);
      summary["ratio_reap_nvm_over_a_mpuf"][key] = ratio;
      std::cout << "REAP-NVM / A-MPUF half-life ratio (" << key << "): " << fmt(ratio, 4) << "x\n";
    }
  }
  out.write("half_life_summary.csv", csv.str());
  out.write_json("half_life_summary.json", summary);
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  int devices = 2;
  std::size_t crps = 102400;
  std::uint64_t seed = 1;
  std::uint64_t challenge_seed = 7;
  std::string baseline = "none";
  DeviceConfig device;
};

int run_simulate(const SimulateOptions& o, const Output& out) {
  if (o.devices < 1) throw ValidationError("--devices must be >= 1");
  DeviceConfig cfg = o.device;
  cfg.nvm_enabled = o.baseline != "apuf";
  const std::string prefix = cfg.nvm_enabled ? "reap-nvm_device" : "apuf_device";
  std::ostringstream wear;
  wear << "device,set_ops_total,reset_ops_total,set_pulses_issued,reset_pulses_issued,max_cell_set_ops\n";
  for (int i = 0; i < o.devices; ++i) {
    auto dev = new_device(o.seed + static_cast<std::uint64_t>(i), cfg);
    const auto crps = gen_crps(dev, o.crps, o.challenge_seed);
    const std::string name = prefix + std::to_string(i);
    out.write(name + "_crps.jsonl", to_jsonl(crps));
    out.write_json(name + "_snapshot.json", to_json(dev));
    std::uint64_t set_total = 0, reset_total = 0, max_set = 0;
    for (auto x : dev.set_count) set_total += x, max_set = std::max(max_set, x);
    for (auto x : dev.reset_count) reset_total += x;
    wear << name << ',' << set_total << ',' << reset_total << ',' << dev.set_pulses_issued << ','
         << dev.reset_pulses_issued << ',' << max_set << '\n';
  }
  out.write(prefix + "_wear_summary.csv", wear.str());
  return 0;
}

// ---------------------------------------------------------------------------
// metrics

struct MetricsOptions {
  std::vector<std::string> datasets;
  std::vector<std::string> snapshots;
  std::size_t width = 128;
  int repeats = 0;
  std::uint64_t noise_seed = 99;
};

std::vector<std::uint8_t> responses(const std::vector<CrpRecord>& crps) {
  std::vector<std::uint8_t> bits;
  bits.reserve(crps.size());
  for (const auto& r : crps) bits.push_back(r.response);
  return bits;
}

int run_metrics(const MetricsOptions& o, const Output& out) {
  if (o.datasets.empty()) throw ValidationError("give at least one --dataset");
  if (!o.snapshots.empty() && o.snapshots.size() != o.datasets.size())
    throw ValidationError("--device must be given once per --dataset, in the same order");
  std::vector<std::vector<CrpRecord>> crps;
  std::vector<ResponseSet> sets;
  for (const auto& path : o.datasets) {
    crps.push_back(crps_from_jsonl(read_file(path)));
    sets.push_back(pack(responses(crps.back()), o.width));
    if (sets.back().dropped > 0)
      std::cerr << "warning: " << path << ": " << sets.back().dropped << " trailing responses dropped\n";
  }
  nlohmann::ordered_json summary;
  summary["width"] = o.width;
  summary["words_per_device"] = sets[0].words.size();

  std::vector<std::size_t> all_weights;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto w = weights(sets[i]);
    all_weights.insert(all_weights.end(), w.begin(), w.end());
    out.write("uniformity_hist_" + std::to_string(i) + ".csv", histogram_csv(histogram(w, o.width)));
    summary["uniformity_percent"].push_back(100.0 * mean(w) / static_cast<double>(o.width));
  }
  out.write("uniformity_hist.csv", histogram_csv(histogram(all_weights, o.width)));

  if (sets.size() < 2) {
    std::cerr << "uniqueness needs at least two devices; skipped\n";
  } else {
    std::vector<std::size_t> dists;
    double scalar = 0.0;
    const auto n_words = sets[0].words.size();
    for (std::size_t w = 0; w < n_words; ++w) {
      std::vector<ResponseWord> per_device;
      for (const auto& s : sets) {
        if (s.words.size() != n_words) throw ValidationError("datasets differ in length");
        per_device.push_back(s.words[w]);
      }
      scalar += uniqueness(per_device);
    }
    for (std::size_t i = 0; i + 1 < sets.size(); ++i)
      for (std::size_t j = i + 1; j < sets.size(); ++j) {
        const auto d = pairwise_distances(sets[i], sets[j]);
        dists.insert(dists.end(), d.begin(), d.end());
      }
    out.write("uniqueness_hist.csv", histogram_csv(histogram(dists, o.width)));
    summary["uniqueness_percent"] = scalar / static_cast<double>(n_words);
    summary["uniqueness_hd_mean_bits"] = mean(dists);
  }
  summary["uniformity_hw_mean_bits"] = mean(all_weights);

  if (o.repeats > 0) {
    if (o.snapshots.empty()) throw ValidationError("reliability needs --device snapshots");
    for (std::size_t i = 0; i < o.snapshots.size(); ++i) {
      auto device = device_from_json(nlohmann::json::parse(read_file(o.snapshots[i])));
      std::vector<ResponseSet> reps;
      for (int r = 0; r < o.repeats; ++r) {
        std::vector<std::uint8_t> bits;
        for (std::size_t k = 0; k < crps[i].size(); ++k)
          bits.push_back(eval(device, crps[i][k].challenge, mix64(o.noise_seed + static_cast<std::uint64_t>(r)) ^ mix64(k)));
        reps.push_back(pack(bits, o.width));
      }
      double acc = 0.0;
      for (std::size_t w = 0; w < sets[i].words.size(); ++w) {
        std::vector<ResponseWord> rw;
        for (const auto& rep : reps) rw.push_back(rep.words[w]);
        acc += reliability(sets[i].words[w], rw);
      }
      summary["reliability_percent"].push_back(acc / static_cast<double>(sets[i].words.size()));
    }
  }
  out.write_json("metrics_summary.json", summary);
  std::cout << summary.dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// attack

struct AttackOptions {
  std::string apuf_file;
  std::string reap_file;
  std::vector<std::size_t> sizes{10000, 20000, 30000, 40000, 50000, 60000, 70000, 80000, 90000};
  std::size_t crps = 102400;
  std::uint64_t seed = 1;
  std::uint64_t challenge_seed = 7;
  std::uint64_t train_seed = 2024;
  std::size_t test_size = 0;
  DeviceConfig device;
};

std::size_t pick_test_size(std::size_t n, const std::vector<std::size_t>& sizes, std::size_t requested) {
  if (requested > 0) return requested;
  const std::size_t largest = sizes.empty() ? 0 : sizes.back();
  if (largest >= n) throw ValidationError("training size " + std::to_string(largest) + " leaves no test data");
  const std::size_t t = std::min(default_test_size(n), n - largest);
  if (t < std::min<std::size_t>(10000, default_test_size(n)))
    throw ValidationError("held-out split of " + std::to_string(t) + " records is too small");
  return t;
}

int run_attack(const AttackOptions& o, const Output& out) {
  std::vector<std::pair<AttackSource, std::vector<CrpRecord>>> sources;
  auto generate = [&](bool nvm) {
    DeviceConfig cfg = o.device;
    cfg.nvm_enabled = nvm;
    auto dev = new_device(o.seed, cfg);
    return gen_crps(dev, o.crps, o.challenge_seed);
  };
  const bool from_files = !o.apuf_file.empty() || !o.reap_file.empty();
  if (!from_files || !o.apuf_file.empty())
    sources.emplace_back(AttackSource::Apuf, from_files ? crps_from_jsonl(read_file(o.apuf_file)) : generate(false));
  if (!from_files || !o.reap_file.empty())
    sources.emplace_back(AttackSource::ReapNvm, from_files ? crps_from_jsonl(read_file(o.reap_file)) : generate(true));

  std::vector<AttackResult> rows;
  for (const auto& [source, crps] : sources) {
    const auto ds = make_attack_dataset(crps, source);
    const auto test = pick_test_size(ds.size(), o.sizes, o.test_size);
    for (const auto& r : attack_curve(ds, o.sizes, o.train_seed, test)) {
      std::cout << to_string(source) << " train=" << r.train_size << " test=" << test
                << " accuracy=" << fmt(r.test_accuracy, 4) << " epochs=" << r.epochs << '\n';
      rows.push_back(r);
    }
  }
  out.write("attack_curve.csv", curve_csv(rows));
  return 0;
}

// ---------------------------------------------------------------------------
// export-chain

int run_export(const ChainOptions& o, const Output& out) {
  for (const auto& [name, chain] : o.resolve()) out.write(name + "_chain.json", export_chain(chain));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"REAP-NVM endurance, quality and attack toolkit"};
  app.config_formatter(std::make_shared<cli::ConfigJson>());
  app.set_config("--config", "", "JSON config file (sections per subcommand)");
  app.require_subcommand(1);
  Output out;
  std::string out_dir = "out";
  app.add_option("--out", out_dir, "Output directory")->envname("REAPNVM_OUT_DIR")->capture_default_str();

  AnalyzeOptions analyze;
  auto* a = app.add_subcommand("analyze", "Per-challenge set/reset operation distributions");
  analyze.chain.add_to(a);
  a->add_option("--epsilon", analyze.epsilon, "Stop when terminal mass >= 1 - epsilon")->capture_default_str();
  a->add_option("--oracle", analyze.oracle, "Monte Carlo trajectories for the oracle comparison (e.g. 1e6)");
  a->add_option("--seed", analyze.seed, "Monte Carlo seed")->capture_default_str();
  a->add_option("--recursion", analyze.recursion, "Visit-count recursion")
      ->check(CLI::IsMember({"joint", "factorized"}))
      ->capture_default_str();

  LifetimeOptions lifetime;
  std::string limit_help = "Endurance limit in cycles";
  auto* l = app.add_subcommand("lifetime", "Lifetime curves and half-life table");
  lifetime.chain.add_to(l);
  l->add_option("--mode", lifetime.modes, "set, reset, combined, either or all (repeatable)")
      ->check(CLI::IsMember({"set", "reset", "combined", "either", "all"}));
  l->add_option("--limit", lifetime.params.endurance_limit, limit_help)->capture_default_str();
  l->add_option("--cells", lifetime.params.cell_count, "Cells per PUF")->capture_default_str();
  l->add_option("--dead-fraction", lifetime.params.dead_fraction, "Dead-cell fraction that kills the PUF")
      ->capture_default_str();
  l->add_option("--grid-max", lifetime.grid_max, "Largest challenge count on the grid")->capture_default_str();
  l->add_option("--grid-factor", lifetime.grid_factor, "Geometric grid spacing")->capture_default_str();
  l->add_option("--epsilon", lifetime.epsilon, "Evolution stop tolerance")->capture_default_str();

  SimulateOptions simulate;
  auto* s = app.add_subcommand("simulate", "Simulate devices and write CRP datasets");
  s->add_option("--devices", simulate.devices, "Number of devices")->capture_default_str();
  s->add_option("--crps", simulate.crps, "CRPs per device")->capture_default_str();
  s->add_option("--seed", simulate.seed, "Seed of device 0 (device i uses seed + i)")->capture_default_str();
  s->add_option("--challenge-seed", simulate.challenge_seed, "Challenge sequence seed")->capture_default_str();
  s->add_option("--baseline", simulate.baseline, "apuf: plain arbiter PUF without NVM cells")
      ->check(CLI::IsMember({"none", "apuf"}))
      ->capture_default_str();
  s->add_option("--variation-sigma", simulate.device.variation_sigma)->capture_default_str();
  s->add_option("--noise-sigma", simulate.device.noise_sigma)->capture_default_str();
  s->add_option("--nvm-variation", simulate.device.nvm_variation)->capture_default_str();

  MetricsOptions metrics;
  auto* m = app.add_subcommand("metrics", "Uniformity, uniqueness and reliability");
  m->add_option("--dataset", metrics.datasets, "CRP dataset, one per device (repeatable)")
      ->required()
      ->check(CLI::ExistingFile);
  m->add_option("--device", metrics.snapshots, "Device snapshot per dataset, for reliability")->check(CLI::ExistingFile);
  m->add_option("--width", metrics.width, "Bits per packed response")->capture_default_str();
  m->add_option("--repeats", metrics.repeats, "Re-evaluations per challenge for reliability")->capture_default_str();
  m->add_option("--noise-seed", metrics.noise_seed)->capture_default_str();

  AttackOptions attack;
  auto* k = app.add_subcommand("attack", "Logistic-regression modeling attack curves");
  k->add_option("--apuf", attack.apuf_file, "APUF CRP dataset")->check(CLI::ExistingFile);
  k->add_option("--reap", attack.reap_file, "REAP-NVM CRP dataset")->check(CLI::ExistingFile);
  k->add_option("--sizes", attack.sizes, "Training sizes")->delimiter(',');
  k->add_option("--crps", attack.crps, "CRPs to generate when no dataset is given")->capture_default_str();
  k->add_option("--seed", attack.seed, "Device seed when generating")->capture_default_str();
  k->add_option("--challenge-seed", attack.challenge_seed)->capture_default_str();
  k->add_option("--train-seed", attack.train_seed)->capture_default_str();
  k->add_option("--test-size", attack.test_size, "Held-out records (default: last 20%, shrunk to fit)");
  k->add_option("--nvm-variation", attack.device.nvm_variation)->capture_default_str();
  k->add_option("--noise-sigma", attack.device.noise_sigma)->capture_default_str();

  ChainOptions exported;
  auto* e = app.add_subcommand("export-chain", "Write chain-spec JSON for built-in chains");
  exported.add_to(e);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kExitValidation;
  }
  out.dir = out_dir;

  try {
    if (a->parsed()) return run_analyze(analyze, out);
    if (l->parsed()) return run_lifetime(lifetime, out);
    if (s->parsed()) return run_simulate(simulate, out);
    if (m->parsed()) return run_metrics(metrics, out);
    if (k->parsed()) return run_attack(attack, out);
    if (e->parsed()) return run_export(exported, out);
  } catch (const ConvergenceError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitNumerical;
  } catch (const ValidationError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitValidation;
  }
  return 0;
}
