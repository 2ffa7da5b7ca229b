#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "injnorm/errors.hpp"
#include "injnorm/experiment.hpp"
#include "injnorm/fitting.hpp"
#include "injnorm/linalg.hpp"
#include "injnorm/optimizers.hpp"
#include "injnorm/random_models.hpp"
#include "injnorm/reference_states.hpp"
#include "injnorm/tensor_io.hpp"

namespace fs = std::filesystem;
using namespace injnorm;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelFlags {
  std::string kind = "gaussian";
  std::string field = "real";
  std::size_t n = 3;
  std::vector<std::size_t> d{2};
  std::vector<std::size_t> q;
  std::uint64_t seed = 0;
  std::uint64_t sample = 0;

  void add(CLI::App* app) {
    app->add_option("--model", kind, "gaussian, gaussian_symmetrized, gaussian_cyclic, mps, mps_ti");
    app->add_option("--field", field, "real or complex");
    app->add_option("--n", n, "tensor order");
    app->add_option("--d", d, "local dimension(s)")->delimiter(',');
    app->add_option("--q", q, "bond dimension(s), MPS only")->delimiter(',');
    app->add_option("--seed", seed, "sampler seed");
    app->add_option("--sample", sample, "sample index");
  }

  ModelSpec spec() const {
    ModelSpec s;
    s.kind = parse_model_kind(kind);
    s.field = parse_field(field);
    s.n = n;
    s.d = d;
    s.q = q;
    if (is_mps(s.kind)) {
      if (s.d.size() == 1) s.d.assign(n, d[0]);
      if (s.q.size() == 1) s.q.assign(n, q[0]);
    }
    s.seed = Seed{seed};
    s.validate();
    return s;
  }
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("malformed JSON in " + path + ": " + e.what());
  }
}

DenseTensor read_any_tensor(const std::string& path) {
  if (!fs::exists(path)) throw UsageError("no such file: " + path);
  if (fs::path(path).extension() == ".json") return tensor_from_json(read_json_file(path));
  return load_tensor(path);
}

void write_any_tensor(const std::string& path, const DenseTensor& t) {
  if (fs::path(path).extension() == ".json") {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write " + path);
    out << tensor_to_json(t).dump() << '\n';
  } else {
    save_tensor(path, t);
  }
}

std::vector<std::size_t> parse_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stoul(item));
    } catch (const std::exception&) {
      throw UsageError("bad integer list '" + s + "'");
    }
  }
  return out;
}

// Results files are averaged per (d, q): the injective estimate for
// sqrt-inverse, the normalized estimate for mps-surface.
std::vector<FitPoint> points_from_csv(const std::string& path, FitKind kind,
                                      const std::string& algorithm) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  std::string header;
  std::getline(in, header);
  if (header.rfind("model_kind,", 0) == 0) {
    in.clear();
    in.seekg(0);
    const auto records = read_results_csv(in);
    // Mean normalized estimate per (d, q).
    std::map<std::pair<double, double>, std::pair<double, std::size_t>> acc;
    const auto want = algorithm.empty() ? std::string() : std::string(to_string(parse_algorithm(algorithm)));
    for (const auto& r : records) {
      if (r.error || (!want.empty() && r.algorithm != want)) continue;
      const double d = std::stod(r.d);
      const double q = r.q.empty() ? 0.0 : std::stod(r.q);
      auto& [sum, count] = acc[{d, q}];
      sum += kind == FitKind::SqrtInverse ? r.injective_estimate : r.normalized_estimate;
      ++count;
    }
    if (acc.empty()) throw UsageError("no usable rows in " + path);
    std::vector<FitPoint> pts;
    for (const auto& [key, v] : acc)
      pts.push_back({key.first, key.second, v.first / static_cast<double>(v.second), 1.0});
    return pts;
  }

  std::vector<std::string> cols;
  {
    std::stringstream ss(header);
    std::string c;
    while (std::getline(ss, c, ',')) {
      while (!c.empty() && (c.back() == '\r' || c.back() == ' ')) c.pop_back();
      cols.push_back(c);
    }
  }
  auto index_of = [&](const std::string& name) -> int {
    for (std::size_t i = 0; i < cols.size(); ++i)
      if (cols[i] == name) return static_cast<int>(i);
    return -1;
  };
  const int id = index_of("d"), iy = index_of("y"), iq = index_of("q"), iw = index_of("weight");
  if (id < 0 || iy < 0) throw UsageError("fit CSV needs columns d and y");
  std::vector<FitPoint> pts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) f.push_back(c);
    if (f.size() != cols.size()) throw FormatError("fit CSV row has wrong column count");
    FitPoint p;
    try {
      p.d = std::stod(f[static_cast<std::size_t>(id)]);
      p.y = std::stod(f[static_cast<std::size_t>(iy)]);
      if (iq >= 0) p.q = std::stod(f[static_cast<std::size_t>(iq)]);
      if (iw >= 0) p.weight = std::stod(f[static_cast<std::size_t>(iw)]);
    } catch (const std::exception&) {
      throw FormatError("non-numeric value in fit CSV: " + line);
    }
    pts.push_back(p);
  }
  return pts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Injective norm and geometric entanglement estimator"};
  app.require_subcommand(1);

  // estimate
  auto* est = app.add_subcommand("estimate", "estimate the injective norm of one tensor");
  ModelFlags est_model;
  est_model.add(est);
  std::string est_input, est_algo = "ngd", est_trace, est_config;
  OptimizerConfig est_cfg;
  bool est_normalize = false;
  est->add_option("--input", est_input, "tensor file (.injt binary or .json)");
  est->add_option("--algorithm", est_algo, "ngd, sgd, als, pim or svd-oracle");
  est->add_option("--config", est_config, "JSON optimizer config");
  est->add_option("--rank", est_cfg.rank);
  est->add_option("--lr", est_cfg.learning_rate, "learning rate");
  est->add_option("--max-epochs", est_cfg.max_epochs);
  est->add_option("--tol", est_cfg.tol);
  est->add_option("--window", est_cfg.plateau_window, "plateau window in epochs");
  est->add_option("--restarts", est_cfg.restarts);
  std::uint64_t est_opt_seed = 0;
  est->add_option("--opt-seed", est_opt_seed, "optimizer seed");
  est->add_flag("--normalize-input", est_normalize);
  est->add_option("--trace-csv", est_trace, "write the best restart's loss trace");

  // sample
  auto* smp = app.add_subcommand("sample", "write a random tensor");
  ModelFlags smp_model;
  smp_model.add(smp);
  std::string smp_output;
  smp->add_option("--output,-o", smp_output, "output path (.json for JSON)")->required();

  // state
  auto* st = app.add_subcommand("state", "build a reference state and print its analytic GME");
  bool st_dicke = false, st_antisym = false;
  std::size_t st_n = 0, st_d = 0;
  std::string st_k, st_output;
  st->add_flag("--dicke", st_dicke);
  st->add_flag("--antisym", st_antisym);
  st->add_option("--n", st_n)->required();
  st->add_option("--d", st_d)->required();
  st->add_option("--k", st_k, "occupation numbers, comma separated");
  st->add_option("--output,-o", st_output);

  // bench
  auto* bn = app.add_subcommand("bench", "run an experiment grid");
  std::string bn_config, bn_output, bn_d, bn_q, bn_algos;
  std::size_t bn_samples = 0;
  std::uint64_t bn_seed = 0;
  bool bn_no_wall = false, bn_normalize = false;
  bn->add_option("--config", bn_config, "JSON experiment config")->required();
  bn->add_option("--output,-o", bn_output, "CSV path; stdout when empty");
  auto* bn_samples_opt = bn->add_option("--samples", bn_samples);
  auto* bn_seed_opt = bn->add_option("--seed", bn_seed);
  bn->add_option("--d-grid", bn_d);
  bn->add_option("--q-grid", bn_q);
  bn->add_option("--algorithms", bn_algos);
  bn->add_flag("--no-wall-time", bn_no_wall);
  bn->add_flag("--normalize-input", bn_normalize);

  // fit
  auto* ft = app.add_subcommand("fit", "fit an asymptotic model to CSV data");
  std::string ft_model = "sqrt-inverse", ft_csv, ft_algo;
  ft->add_option("--model", ft_model, "sqrt-inverse or mps-surface");
  ft->add_option("--algorithm", ft_algo, "results CSV only: keep rows of this algorithm");
  ft->add_option("csv", ft_csv, "results CSV or a d,y[,q][,weight] table")->required();

  auto fail = [](int code, const std::string& kind, const std::string& msg) {
    std::cerr << json{{"error", kind}, {"message", msg}}.dump() << '\n';
    return code;
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(2, "UsageError", e.what());
  }

  try {
    apply_thread_setting();

    if (*est) {
      DenseTensor psi = est_input.empty() ? sample_model(est_model.spec(), Seed{est_model.seed},
                                                         est_model.sample)
                                          : read_any_tensor(est_input);
      if (est_normalize) psi = normalized(psi);
      json out;
      if (est_algo == "svd-oracle") {
        const double norm = euclidean_norm(psi);
        const double inj = operator_norm_order2(psi);
        const double ratio = inj / norm;
        out = {{"algorithm", "svd-oracle"},
               {"euclidean_norm", norm},
               {"injective_norm", inj},
               {"normalized", ratio},
               {"gme_bits", -std::log2(ratio * ratio)}};
      } else {
        OptimizerConfig cfg;
        if (!est_config.empty()) from_json(read_json_file(est_config), cfg);
        // Explicit flags win over the config file.
        if (est->count("--rank")) cfg.rank = est_cfg.rank;
        if (est->count("--lr")) cfg.learning_rate = est_cfg.learning_rate;
        if (est->count("--max-epochs")) cfg.max_epochs = est_cfg.max_epochs;
        if (est->count("--tol")) cfg.tol = est_cfg.tol;
        if (est->count("--window")) cfg.plateau_window = est_cfg.plateau_window;
        if (est->count("--restarts")) cfg.restarts = est_cfg.restarts;
        if (est->count("--opt-seed")) cfg.seed = Seed{est_opt_seed};
        cfg.algorithm = parse_algorithm(est_algo);
        cfg.record_trace = !est_trace.empty();
        const auto r = estimate_injective_norm(psi, cfg);
        out = {{"algorithm", to_string(cfg.algorithm)},
               {"euclidean_norm", r.euclidean_norm},
               {"injective_norm", r.injective_norm},
               {"normalized", r.normalized},
               {"gme_bits", r.gme_bits},
               {"loss", r.best.loss},
               {"epochs_used", r.best.epochs_used},
               {"restart_index", r.best.restart_index},
               {"regularized", r.best.regularized}};
        if (!est_trace.empty()) {
          std::ofstream tr(est_trace);
          if (!tr) throw UsageError("cannot write " + est_trace);
          write_loss_trace_csv(tr, r.best);
        }
      }
      std::cout << out.dump(2) << '\n';
    } else if (*smp) {
      const auto spec = smp_model.spec();
      write_any_tensor(smp_output, sample_model(spec, Seed{smp_model.seed}, smp_model.sample));
    } else if (*st) {
      if (st_dicke == st_antisym) throw UsageError("choose exactly one of --dicke or --antisym");
      json out{{"n", st_n}, {"d", st_d}};
      DenseTensor psi = DenseTensor::zeros({1}, Field::Real);
      if (st_dicke) {
        DickeSpec spec{st_n, st_d, parse_list(st_k)};
        spec.validate();
        psi = build_dicke(spec);
        out["state"] = "dicke";
        out["k"] = spec.kvec;
        out["gme_bits"] = gme_dicke(spec);
      } else {
        AntisymSpec spec{st_n, st_d};
        spec.validate();
        psi = build_antisym(spec);
        out["state"] = "antisym";
        out["gme_bits"] = gme_antisym(spec);
      }
      out["normalized"] = std::exp2(-out["gme_bits"].get<double>() / 2);
      if (!st_output.empty()) write_any_tensor(st_output, psi);
      std::cout << out.dump(2) << '\n';
    } else if (*bn) {
      ExperimentConfig cfg;
      try {
        from_json(read_json_file(bn_config), cfg);
      } catch (const json::exception& e) {
        throw UsageError(std::string("malformed experiment config: ") + e.what());
      } catch (const SpecError& e) {
        throw UsageError(std::string("malformed experiment config: ") + e.what());
      }
      if (!bn_output.empty()) cfg.output = bn_output;
      if (bn_samples_opt->count()) cfg.samples = bn_samples;
      if (bn_seed_opt->count()) cfg.seed = Seed{bn_seed};
      if (!bn_d.empty()) cfg.d_grid = parse_list(bn_d);
      if (!bn_q.empty()) cfg.q_grid = parse_list(bn_q);
      if (!bn_algos.empty()) {
        cfg.algorithms.clear();
        std::stringstream ss(bn_algos);
        std::string a;
        while (std::getline(ss, a, ',')) cfg.algorithms.push_back(parse_algorithm(a));
      }
      if (bn_no_wall) cfg.record_wall_time = false;
      if (bn_normalize) cfg.normalize_input = true;
      if (cfg.output.empty() || cfg.output == "-") {
        run_experiment(cfg, &std::cout);
      } else {
        std::ofstream out(cfg.output);
        if (!out) throw UsageError("cannot write " + cfg.output);
        run_experiment(cfg, &out);
      }
    } else if (*ft) {
      if (!fs::exists(ft_csv)) throw UsageError("no such file: " + ft_csv);
      const auto kind = parse_fit_kind(ft_model);
      const auto result = fit(kind, points_from_csv(ft_csv, kind, ft_algo));
      std::cout << fit_report(result).dump(2) << '\n';
    }
  } catch (const UsageError& e) {
    return fail(2, "UsageError", e.what());
  } catch (const Error& e) {
    return fail(1, e.kind(), e.what());
  } catch (const std::exception& e) {
    return fail(1, "InternalError", e.what());
  }
  return 0;
}
