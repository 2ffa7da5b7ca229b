#include "injnorm/experiment.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <omp.h>

#include "injnorm/errors.hpp"
#include "injnorm/linalg.hpp"

namespace injnorm {

namespace {

constexpr std::uint64_t kTagSample = 0x73616d70ULL;
constexpr std::uint64_t kTagOptimizer = 0x6f707469ULL;

const char* const kColumns[] = {
    "model_kind", "field", "n", "d", "q", "symmetry", "algorithm", "rank", "seed",
    "sample_index", "euclidean_norm", "injective_estimate", "normalized_estimate", "gme_bits",
    "epochs_used", "restarts", "wall_time_ms"};
constexpr std::size_t kNumColumns = std::size(kColumns);

std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string join_dims(const std::vector<std::size_t>& v) {
  bool uniform = std::all_of(v.begin(), v.end(), [&](std::size_t x) { return x == v[0]; });
  if (uniform) return std::to_string(v[0]);
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + std::to_string(v[i]);
  return s;
}

std::string_view symmetry_of(ModelKind k) {
  switch (k) {
    case ModelKind::GaussianSymmetrized: return "full";
    case ModelKind::GaussianCyclic: return "cyclic";
    case ModelKind::MPSTranslationInvariant: return "translation";
    default: return "none";
  }
}

std::uint64_t point_hash(const ModelSpec& p) {
  std::uint64_t h = mix64(p.d.size());
  for (auto d : p.d) h = mix64(h ^ d);
  h = mix64(h ^ 0x71ULL);
  for (auto q : p.q) h = mix64(h ^ q);
  return h;
}

ResultRecord run_one(const ExperimentConfig& cfg, const ModelSpec& point, std::size_t sample,
                     Algorithm algo) {
  ResultRecord rec;
  rec.model_kind = std::string(to_string(point.kind));
  rec.field = std::string(to_string(point.field));
  rec.n = point.n;
  rec.d = join_dims(point.d);
  rec.q = is_mps(point.kind) ? join_dims(point.q) : "";
  rec.symmetry = std::string(symmetry_of(point.kind));
  rec.algorithm = std::string(to_string(algo));
  rec.rank = cfg.optimizer.rank;
  rec.seed = cfg.seed.value;
  rec.sample_index = sample;
  rec.restarts = cfg.optimizer.restarts;

  const auto start = std::chrono::steady_clock::now();
  try {
    DenseTensor psi = sample_model(point, sample_seed(cfg.seed, point), sample);
    if (cfg.normalize_input) psi = normalized(psi);
    OptimizerConfig oc = cfg.optimizer;
    oc.algorithm = algo;
    oc.seed = optimizer_seed(cfg.seed, point, sample);
    oc.record_trace = false;
    const auto est = estimate_injective_norm(psi, oc);
    rec.euclidean_norm = est.euclidean_norm;
    rec.injective_estimate = est.injective_norm;
    rec.normalized_estimate = est.normalized;
    rec.gme_bits = est.gme_bits;
    rec.epochs_used = est.best.epochs_used;
  } catch (const Error& e) {
    rec.error = std::string(e.kind()) + ": " + e.what();
  }
  if (cfg.record_wall_time)
    rec.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

template <class T>
T parse_number(const std::string& s, const char* column) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw FormatError("bad value '" + s + "' in column " + column);
  return v;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (samples == 0) throw SpecError("samples must be >= 1");
  if (algorithms.empty()) throw SpecError("at least one algorithm is required");
  for (auto d : d_grid)
    if (d == 0) throw SpecError("d grid values must be positive");
  for (auto q : q_grid)
    if (q == 0) throw SpecError("q grid values must be positive");
  optimizer.validate();
  for (const auto& p : grid()) p.validate();
}

std::vector<ModelSpec> ExperimentConfig::grid() const {
  std::vector<ModelSpec> out;
  const bool mps = is_mps(model.kind);
  std::vector<std::vector<std::size_t>> ds, qs;
  if (d_grid.empty()) ds.push_back(model.d);
  for (auto d : d_grid) ds.push_back(std::vector<std::size_t>(mps ? model.n : 1, d));
  if (mps) {
    if (q_grid.empty()) qs.push_back(model.q);
    for (auto q : q_grid) qs.push_back(std::vector<std::size_t>(model.n, q));
  } else {
    qs.push_back({});
  }
  for (const auto& d : ds)
    for (const auto& q : qs) {
      ModelSpec p = model;
      p.d = d;
      p.q = q;
      p.seed = seed;
      out.push_back(std::move(p));
    }
  return out;
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  nlohmann::json algos = nlohmann::json::array();
  for (auto a : c.algorithms) algos.push_back(to_string(a));
  j = nlohmann::json{{"model", c.model},
                     {"algorithms", algos},
                     {"optimizer", c.optimizer},
                     {"d_grid", c.d_grid},
                     {"q_grid", c.q_grid},
                     {"samples", c.samples},
                     {"seed", c.seed.value},
                     {"output", c.output},
                     {"normalize_input", c.normalize_input},
                     {"record_wall_time", c.record_wall_time}};
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  static const char* const known[] = {"model",   "algorithms", "optimizer", "d_grid",
                                      "q_grid",  "samples",    "seed",      "output",
                                      "normalize_input", "record_wall_time"};
  for (const auto& [key, _] : j.items())
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return key == k; }) == std::end(known))
      throw SpecError("unknown experiment config key '" + key + "'");
  if (j.contains("model")) c.model = j.at("model").get<ModelSpec>();
  if (j.contains("algorithms")) {
    c.algorithms.clear();
    for (const auto& a : j.at("algorithms")) c.algorithms.push_back(parse_algorithm(a.get<std::string>()));
  }
  if (j.contains("optimizer")) from_json(j.at("optimizer"), c.optimizer);
  c.d_grid = j.value("d_grid", c.d_grid);
  c.q_grid = j.value("q_grid", c.q_grid);
  c.samples = j.value("samples", c.samples);
  c.seed = Seed{j.value("seed", c.seed.value)};
  c.output = j.value("output", c.output);
  c.normalize_input = j.value("normalize_input", c.normalize_input);
  c.record_wall_time = j.value("record_wall_time", c.record_wall_time);
}

Seed sample_seed(Seed master, const ModelSpec& point) {
  return Seed{derive_key(master, {kTagSample, point_hash(point)})};
}

Seed optimizer_seed(Seed master, const ModelSpec& point, std::size_t sample_index) {
  return Seed{derive_key(master, {kTagOptimizer, point_hash(point), sample_index})};
}

std::vector<ResultRecord> run_experiment(const ExperimentConfig& cfg, std::ostream* out) {
  cfg.validate();
  const auto points = cfg.grid();
  const std::size_t n_algo = cfg.algorithms.size();
  const std::size_t total = points.size() * cfg.samples * n_algo;
  std::vector<ResultRecord> records(total);
  std::vector<char> done(total, 0);
  std::size_t next = 0;

  if (out) write_csv_header(*out);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t t = 0; t < total; ++t) {
    const std::size_t a = t % n_algo;
    const std::size_t s = (t / n_algo) % cfg.samples;
    const std::size_t p = t / (n_algo * cfg.samples);
    ResultRecord rec = run_one(cfg, points[p], s, cfg.algorithms[a]);
#pragma omp critical(injnorm_writer)
    {
      records[t] = std::move(rec);
      done[t] = 1;
      while (next < total && done[next]) {
        if (out) {
          write_csv_row(*out, records[next]);
          out->flush();
        }
        if (records[next].error)
          std::cerr << "record " << next << " failed: " << *records[next].error << '\n';
        ++next;
      }
    }
  }
  return records;
}

void write_csv_header(std::ostream& os) {
  for (std::size_t i = 0; i < kNumColumns; ++i) os << (i ? "," : "") << kColumns[i];
  os << '\n';
}

void write_csv_row(std::ostream& os, const ResultRecord& r) {
  const bool ok = !r.error;
  auto num = [&](double v) { return ok ? fmt(v) : std::string(); };
  os << r.model_kind << ',' << r.field << ',' << r.n << ',' << r.d << ',' << r.q << ','
     << r.symmetry << ',' << r.algorithm << ',' << r.rank << ',' << r.seed << ','
     << r.sample_index << ',' << num(r.euclidean_norm) << ',' << num(r.injective_estimate) << ','
     << num(r.normalized_estimate) << ',' << num(r.gme_bits) << ','
     << (ok ? std::to_string(r.epochs_used) : std::string()) << ',' << r.restarts << ','
     << fmt(r.wall_time_ms) << '\n';
}

std::vector<ResultRecord> read_results_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("empty results CSV");
  const auto header = split(line, ',');
  if (header.size() != kNumColumns) throw FormatError("results CSV header has wrong column count");
  for (std::size_t i = 0; i < kNumColumns; ++i)
    if (header[i] != kColumns[i]) throw FormatError("unexpected column '" + header[i] + "'");

  std::vector<ResultRecord> out;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split(line, ',');
    if (f.size() != kNumColumns) throw FormatError("results CSV row has wrong column count");
    ResultRecord r;
    r.model_kind = f[0];
    r.field = f[1];
    r.n = parse_number<std::size_t>(f[2], "n");
    r.d = f[3];
    r.q = f[4];
    r.symmetry = f[5];
    r.algorithm = f[6];
    r.rank = parse_number<std::size_t>(f[7], "rank");
    r.seed = parse_number<std::uint64_t>(f[8], "seed");
    r.sample_index = parse_number<std::size_t>(f[9], "sample_index");
    if (f[12].empty()) {
      r.error = "missing estimate";
    } else {
      r.euclidean_norm = parse_number<double>(f[10], "euclidean_norm");
      r.injective_estimate = parse_number<double>(f[11], "injective_estimate");
      r.normalized_estimate = parse_number<double>(f[12], "normalized_estimate");
      r.gme_bits = parse_number<double>(f[13], "gme_bits");
      r.epochs_used = parse_number<std::size_t>(f[14], "epochs_used");
    }
    r.restarts = parse_number<std::size_t>(f[15], "restarts");
    r.wall_time_ms = parse_number<double>(f[16], "wall_time_ms");
    out.push_back(std::move(r));
  }
  return out;
}

int configured_threads() {
  const char* env = std::getenv("INJNORM_THREADS");
  if (!env || !*env) return 0;
  int v = 0;
  auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), v);
  if (ec != std::errc() || *ptr != '\0' || v < 1)
    throw SpecError(std::string("INJNORM_THREADS must be a positive integer, got '") + env + "'");
  return v;
}

void apply_thread_setting() {
  if (const int t = configured_threads(); t > 0) omp_set_num_threads(t);
}

}  // namespace injnorm
