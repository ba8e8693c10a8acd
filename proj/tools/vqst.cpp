// vqst: simulate XY-chain dynamics, sample projective measurement data, and
// reconstruct states with MPS / RBM / ARN ansaetze.
//
// Subcommands: gen-bases, simulate, sample, train, eval, compare.

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "vqst/arn.hpp"
#include "vqst/hamiltonian.hpp"
#include "vqst/measurement.hpp"
#include "vqst/metrics.hpp"
#include "vqst/mps.hpp"
#include "vqst/rbm.hpp"
#include "vqst/rng.hpp"
#include "vqst/state_io.hpp"
#include "vqst/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vqst;

namespace {

constexpr const char* kFormatDataset = "VQST1";
constexpr const char* kFormatState = "VQSTSV1";

struct ExperimentConfig {
  XYModelParams model;
  std::vector<double> times{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5};
  std::string time_unit = "rescaled";  // J0*t, or "seconds"
  std::string target = "xy";           // or "volume-law"
  int shots_per_basis = 1000;
  std::vector<std::uint64_t> seeds{1};
  std::vector<std::string> ansatzes{"mps", "rbm", "arn"};
  int dense_cap = kDefaultDenseCap;
  bool sector = false;
  int mps_chi_max = 10;
  int rbm_hidden = 100;
  int rbm_chains = 1024;
  bool arn_renormalize_support = true;
  TrainConfig train;

  json resolved;  // full config echoed into manifests
};

json train_config_to_json(const TrainConfig& t) {
  return json{{"learning_rate", t.learning_rate}, {"beta1", t.beta1},
              {"beta2", t.beta2},                 {"epsilon", t.epsilon},
              {"max_epochs", t.max_epochs},       {"patience", t.patience},
              {"samples_per_epoch", t.samples_per_epoch}, {"checkpoint_every", t.checkpoint_every},
              {"divergence_factor", t.divergence_factor}};
}

ExperimentConfig load_config(const std::string& path) {
  ExperimentConfig cfg;
  json j = json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    in >> j;
  }
  cfg.model.qubit_count = j.value("qubit_count", 8);
  cfg.model.coupling_j0 = j.value("coupling_j0", cfg.model.coupling_j0);
  cfg.model.alpha = j.value("alpha", cfg.model.alpha);
  cfg.model.field_b = j.value("field_b", cfg.model.field_b);
  if (j.contains("times")) cfg.times = j.at("times").get<std::vector<double>>();
  cfg.time_unit = j.value("time_unit", cfg.time_unit);
  cfg.target = j.value("target", cfg.target);
  cfg.shots_per_basis = j.value("shots_per_basis", cfg.shots_per_basis);
  if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("ansatzes")) cfg.ansatzes = j.at("ansatzes").get<std::vector<std::string>>();
  cfg.dense_cap = j.value("dense_cap", cfg.dense_cap);
  cfg.sector = j.value("sector", cfg.sector);
  if (j.contains("mps")) cfg.mps_chi_max = j.at("mps").value("chi_max", cfg.mps_chi_max);
  if (j.contains("rbm")) {
    cfg.rbm_hidden = j.at("rbm").value("hidden", cfg.rbm_hidden);
    cfg.rbm_chains = j.at("rbm").value("chains", cfg.rbm_chains);
  }
  if (j.contains("arn"))
    cfg.arn_renormalize_support = j.at("arn").value("renormalize_support", cfg.arn_renormalize_support);
  if (j.contains("train")) {
    const json& t = j.at("train");
    cfg.train.learning_rate = t.value("learning_rate", cfg.train.learning_rate);
    cfg.train.max_epochs = t.value("max_epochs", cfg.train.max_epochs);
    cfg.train.patience = t.value("patience", cfg.train.patience);
    cfg.train.samples_per_epoch = t.value("samples_per_epoch", cfg.train.samples_per_epoch);
    cfg.train.checkpoint_every = t.value("checkpoint_every", cfg.train.checkpoint_every);
    cfg.train.divergence_factor = t.value("divergence_factor", cfg.train.divergence_factor);
  }

  cfg.resolved = json{{"qubit_count", cfg.model.qubit_count},
                      {"coupling_j0", cfg.model.coupling_j0},
                      {"alpha", cfg.model.alpha},
                      {"field_b", cfg.model.field_b},
                      {"times", cfg.times},
                      {"time_unit", cfg.time_unit},
                      {"target", cfg.target},
                      {"shots_per_basis", cfg.shots_per_basis},
                      {"seeds", cfg.seeds},
                      {"ansatzes", cfg.ansatzes},
                      {"dense_cap", cfg.dense_cap},
                      {"sector", cfg.sector},
                      {"mps", {{"chi_max", cfg.mps_chi_max}}},
                      {"rbm", {{"hidden", cfg.rbm_hidden}, {"chains", cfg.rbm_chains}}},
                      {"arn", {{"renormalize_support", cfg.arn_renormalize_support}}},
                      {"train", train_config_to_json(cfg.train)}};
  return cfg;
}

double time_in_seconds(const ExperimentConfig& cfg, double tau) {
  return cfg.time_unit == "rescaled" ? tau / cfg.model.coupling_j0 : tau;
}

void write_manifest(const fs::path& dir, const std::string& command, const json& payload) {
  json manifest{{"command", command},
                {"format_versions", {{"dataset", kFormatDataset}, {"state", kFormatState}}}};
  manifest.update(payload);
  std::ofstream out(dir / "manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest in " + dir.string());
  out << manifest.dump(2) << "\n";
}

StateVector ground_truth_state(const ExperimentConfig& cfg, double tau) {
  if (cfg.target == "volume-law") return volume_law_state(cfg.model.qubit_count);
  const double t = time_in_seconds(cfg, tau);
  const StateVector start = neel_state(cfg.model.qubit_count);
  if (cfg.sector || cfg.model.qubit_count > cfg.dense_cap) {
    // the Neel state has ceil(N/2) excitations
    const SectorHamiltonian sector = sector_restrict(cfg.model, (cfg.model.qubit_count + 1) / 2);
    return sector.to_full(evolve_sector(sector.project(start), sector, t));
  }
  const XYHamiltonian h = build_hamiltonian(cfg.model, cfg.dense_cap);
  return evolve(start, h, t);
}

// ---------------------------------------------------------------------------
// train/eval helpers shared by the train, eval, and compare subcommands

struct RunMetrics {
  double fidelity = std::numeric_limits<double>::quiet_NaN();
  double test_loss = std::numeric_limits<double>::quiet_NaN();
  double loss_difference = std::numeric_limits<double>::quiet_NaN();
  int epochs_to_stop = -1;
  int best_epoch = -1;
};

struct TrainedAnsatz {
  std::string kind;
  StateVector dense;      // normalized reconstruction at the best checkpoint
  TrainResult result;
  std::function<void(const std::string&)> save;
};

TrainedAnsatz run_training(const std::string& ansatz, const ExperimentConfig& cfg,
                           const MeasurementDataset& data, std::uint64_t seed,
                           const StateVector* truth) {
  TrainConfig tc = cfg.train;
  tc.seed = seed;
  const int n = data.qubit_count;
  TrainedAnsatz out;
  out.kind = ansatz;
  if (ansatz == "mps") {
    auto model = std::make_shared<MatrixProductState>(MatrixProductState::random(n, cfg.mps_chi_max, seed));
    out.result = train(*model, data, tc, truth);
    out.dense = model->to_dense();
    out.save = [model](const std::string& p) { model->save(p); };
  } else if (ansatz == "rbm") {
    auto model = std::make_shared<RbmWavefunction>(n, cfg.rbm_hidden, cfg.rbm_chains, seed);
    out.result = train(*model, data, tc, truth);
    out.dense = model->to_dense();
    out.save = [model](const std::string& p) { model->save(p); };
  } else if (ansatz == "arn") {
    auto model = std::make_shared<AutoregressiveWavefunction>(n, seed);
    model->set_renormalize_support(cfg.arn_renormalize_support);
    out.result = train(*model, data, tc, truth);
    out.dense = model->to_dense();
    out.save = [model](const std::string& p) { model->save(p); };
  } else {
    throw std::runtime_error("unknown ansatz '" + ansatz + "' (expected mps|rbm|arn)");
  }
  return out;
}

RunMetrics evaluate_reconstruction(const StateVector& reconstruction, const MeasurementDataset& data,
                                   const StateVector* truth) {
  auto [train_view, test_view] = split(data);
  RunMetrics m;
  m.test_loss = dense_loss(reconstruction, test_view);
  if (truth) {
    m.fidelity = fidelity(*truth, reconstruction);
    m.loss_difference = loss_difference(*truth, reconstruction, test_view);
  }
  return m;
}

StateVector load_checkpoint_dense(const std::string& path, std::string* kind_out = nullptr) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw std::runtime_error("cannot open checkpoint " + path);
  std::string magic;
  probe >> magic;
  probe.close();
  if (magic == "VQSTMPS1") {
    if (kind_out) *kind_out = "mps";
    return MatrixProductState::load(path).to_dense();
  }
  if (magic == "VQSTRBM1") {
    if (kind_out) *kind_out = "rbm";
    return RbmWavefunction::load(path).to_dense();
  }
  if (magic == "VQSTARN1") {
    if (kind_out) *kind_out = "arn";
    return AutoregressiveWavefunction::load(path).to_dense();
  }
  throw std::runtime_error("unrecognized checkpoint format in " + path);
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

// ---------------------------------------------------------------------------
// subcommands

int cmd_gen_bases(int n, const std::string& out_path) {
  const auto bases = generate_bases(n);
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw std::runtime_error("cannot open " + out_path);
    out = &file;
  }
  for (const auto& b : bases) *out << pauli_string_to_string(b) << "\n";
  return 0;
}

int cmd_simulate(const ExperimentConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  json states = json::array();
  for (std::size_t k = 0; k < cfg.times.size(); ++k) {
    const StateVector state = ground_truth_state(cfg, cfg.times[k]);
    char name[64];
    std::snprintf(name, sizeof(name), "state_%03zu.vqsv", k);
    write_state((fs::path(out_dir) / name).string(), state);
    states.push_back({{"file", name}, {"time", cfg.times[k]}, {"time_unit", cfg.time_unit}});
  }
  write_manifest(out_dir, "simulate", json{{"config", cfg.resolved}, {"states", states}});
  std::cout << "wrote " << cfg.times.size() << " state files to " << out_dir << "\n";
  return 0;
}

int cmd_sample(const std::string& state_path, int shots, std::uint64_t seed, const std::string& out_path) {
  const StateVector state = read_state(state_path);
  const auto bases = generate_bases(state.qubit_count);
  const MeasurementDataset data = sample_dataset(state, bases, shots, seed);
  write_dataset(data, out_path);
  json manifest{{"command", "sample"},
                {"state_file", state_path},
                {"qubit_count", state.qubit_count},
                {"shots_per_basis", shots},
                {"seed", seed},
                {"format_versions", {{"dataset", kFormatDataset}, {"state", kFormatState}}}};
  std::ofstream mout(out_path + ".manifest.json");
  mout << manifest.dump(2) << "\n";
  std::cout << "wrote " << data.total_shots() << " records to " << out_path << "\n";
  return 0;
}

int cmd_train(const ExperimentConfig& cfg, const std::string& data_path, const std::string& ansatz,
              std::uint64_t seed, const std::string& truth_path, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const MeasurementDataset data = read_dataset(data_path);
  std::optional<StateVector> truth;
  if (!truth_path.empty()) truth = read_state(truth_path);

  const TrainedAnsatz trained = run_training(ansatz, cfg, data, seed, truth ? &*truth : nullptr);
  const std::string ckpt = (fs::path(out_dir) / ("checkpoint." + ansatz)).string();
  trained.save(ckpt);
  write_curve_csv((fs::path(out_dir) / "curve.csv").string(), trained.result.curve);

  const RunMetrics metrics = evaluate_reconstruction(trained.dense, data, truth ? &*truth : nullptr);
  write_manifest(out_dir, "train",
                 json{{"config", cfg.resolved},
                      {"data_file", data_path},
                      {"ansatz", ansatz},
                      {"seed", seed},
                      {"early_stop_epoch", trained.result.best_epoch},
                      {"epochs_run", trained.result.curve.size()},
                      {"best_test_loss", trained.result.best_test_loss},
                      {"fidelity", metrics.fidelity},
                      {"checkpoint", "checkpoint." + ansatz}});
  std::cout << "ansatz " << ansatz << ": stopped at epoch " << trained.result.curve.size()
            << ", best epoch " << trained.result.best_epoch << ", test loss "
            << trained.result.best_test_loss << "\n";
  return 0;
}

int cmd_eval(const std::string& ckpt_path, const std::string& data_path, const std::string& truth_path,
             const std::string& out_dir) {
  fs::create_directories(out_dir);
  std::string kind;
  const StateVector reconstruction = load_checkpoint_dense(ckpt_path, &kind);
  const MeasurementDataset data = read_dataset(data_path);
  std::optional<StateVector> truth;
  if (!truth_path.empty()) truth = read_state(truth_path);

  const RunMetrics metrics = evaluate_reconstruction(reconstruction, data, truth ? &*truth : nullptr);

  const CorrelationReport recon_rep = correlation_report_from_state(reconstruction, Pauli::Y, "reconstruction");
  write_vector_csv((fs::path(out_dir) / "magnetization_reconstruction.csv").string(), recon_rep.single_site);
  write_matrix_csv((fs::path(out_dir) / "correlations_raw_reconstruction.csv").string(), recon_rep.pair_raw);
  write_matrix_csv((fs::path(out_dir) / "correlations_connected_reconstruction.csv").string(),
                   recon_rep.pair_connected);

  const CorrelationReport data_rep = correlation_report_from_data(data, Pauli::Y);
  write_vector_csv((fs::path(out_dir) / "magnetization_data.csv").string(), data_rep.single_site);
  write_matrix_csv((fs::path(out_dir) / "correlations_raw_data.csv").string(), data_rep.pair_raw);

  json metrics_json{{"ansatz", kind},
                    {"test_loss", metrics.test_loss},
                    {"checkpoint", ckpt_path},
                    {"data_file", data_path}};
  if (truth) {
    metrics_json["fidelity"] = metrics.fidelity;
    metrics_json["loss_difference"] = metrics.loss_difference;
    const CorrelationReport truth_rep = correlation_report_from_state(*truth, Pauli::Y, "theory");
    write_vector_csv((fs::path(out_dir) / "magnetization_theory.csv").string(), truth_rep.single_site);
    write_matrix_csv((fs::path(out_dir) / "correlations_raw_theory.csv").string(), truth_rep.pair_raw);
  }
  std::ofstream mout(fs::path(out_dir) / "metrics.json");
  mout << metrics_json.dump(2) << "\n";
  std::cout << metrics_json.dump(2) << "\n";
  return 0;
}

int cmd_compare(const ExperimentConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const int n = cfg.model.qubit_count;
  const auto bases = generate_bases(n);
  const std::vector<double> taus = cfg.target == "volume-law" ? std::vector<double>{0.0} : cfg.times;

  std::ofstream detail(fs::path(out_dir) / "detail.csv");
  detail << "time,ansatz,seed,fidelity,test_loss,loss_difference,epochs_to_stop\n";
  detail.precision(10);

  std::ofstream table(fs::path(out_dir) / "table.csv");
  table << "time,ansatz,fidelity,test_loss,loss_difference,epochs_to_stop\n";
  table.precision(10);

  std::cout << "time      ansatz  fidelity    test_loss      loss_diff     epochs\n";
  for (double tau : taus) {
    const StateVector truth = ground_truth_state(cfg, tau);
    for (const std::string& ansatz : cfg.ansatzes) {
      std::vector<double> fids, losses, diffs, epochs;
      for (std::uint64_t seed : cfg.seeds) {
        std::uint64_t mix = seed;
        const std::uint64_t data_seed = splitmix64(mix) ^ static_cast<std::uint64_t>(tau * 1e6);
        const MeasurementDataset data = sample_dataset(truth, bases, cfg.shots_per_basis, data_seed);
        const TrainedAnsatz trained = run_training(ansatz, cfg, data, seed, &truth);
        const RunMetrics m = evaluate_reconstruction(trained.dense, data, &truth);
        fids.push_back(m.fidelity);
        losses.push_back(m.test_loss);
        diffs.push_back(m.loss_difference);
        epochs.push_back(trained.result.best_epoch);
        detail << tau << "," << ansatz << "," << seed << "," << m.fidelity << "," << m.test_loss << ","
               << m.loss_difference << "," << trained.result.best_epoch << "\n";
        detail.flush();
      }
      table << tau << "," << ansatz << "," << median(fids) << "," << median(losses) << ","
            << median(diffs) << "," << median(epochs) << "\n";
      table.flush();
      std::printf("%-9.3f %-7s %-11.6f %-14.4f %-13.4f %-6d\n", tau, ansatz.c_str(), median(fids),
                  median(losses), median(diffs), static_cast<int>(median(epochs)));
      std::fflush(stdout);
    }
  }
  write_manifest(out_dir, "compare", json{{"config", cfg.resolved}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational tomography of XY spin-chain states (MPS / RBM / ARN)"};
  app.require_subcommand(1);

  std::string config_path, out_path, state_path, data_path, ckpt_path, truth_path, ansatz = "mps";
  std::uint64_t seed = 1;
  int n = 20, shots = 1000, dense_cap = -1;

  auto* gen = app.add_subcommand("gen-bases", "print the 27 periodicity-3 measurement bases");
  gen->add_option("--n", n, "qubit count")->required();
  gen->add_option("--out", out_path, "output file (default stdout)");

  auto* sim = app.add_subcommand("simulate", "evolve the Neel state and write state files");
  sim->add_option("--config", config_path, "experiment config JSON");
  sim->add_option("--out", out_path, "output directory")->required();
  sim->add_option("--dense-cap", dense_cap, "override the dense-space cap");

  auto* smp = app.add_subcommand("sample", "sample a VQST1 dataset from a state file");
  smp->add_option("--state", state_path, "input state file")->required();
  smp->add_option("--shots", shots, "shots per basis");
  smp->add_option("--seed", seed, "sampling seed");
  smp->add_option("--out", out_path, "output dataset path")->required();

  auto* trn = app.add_subcommand("train", "train one ansatz on a dataset");
  trn->add_option("--config", config_path, "experiment config JSON");
  trn->add_option("--data", data_path, "VQST1 dataset")->required();
  trn->add_option("--ansatz", ansatz, "mps|rbm|arn")->required();
  trn->add_option("--seed", seed, "initialization/sampling seed");
  trn->add_option("--ground-truth", truth_path, "state file for fidelity tracking");
  trn->add_option("--out", out_path, "output directory")->required();

  auto* evl = app.add_subcommand("eval", "evaluate a checkpoint against data (and optional ground truth)");
  evl->add_option("--checkpoint", ckpt_path, "checkpoint file")->required();
  evl->add_option("--data", data_path, "VQST1 dataset")->required();
  evl->add_option("--ground-truth", truth_path, "state file");
  evl->add_option("--out", out_path, "output directory")->required();

  auto* cmp = app.add_subcommand("compare", "full pipeline: per time point x per ansatz table");
  cmp->add_option("--config", config_path, "experiment config JSON")->required();
  cmp->add_option("--out", out_path, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_bases(n, out_path);
    ExperimentConfig cfg = load_config(config_path);
    if (dense_cap > 0) cfg.dense_cap = dense_cap;
    if (sim->parsed()) return cmd_simulate(cfg, out_path);
    if (smp->parsed()) return cmd_sample(state_path, shots, seed, out_path);
    if (trn->parsed()) return cmd_train(cfg, data_path, ansatz, seed, truth_path, out_path);
    if (evl->parsed()) return cmd_eval(ckpt_path, data_path, truth_path, out_path);
    if (cmp->parsed()) return cmd_compare(cfg, out_path);
  } catch (const std::exception& e) {
    std::cerr << "vqst: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
