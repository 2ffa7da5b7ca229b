#include "injnorm/random_models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "injnorm/kernels.hpp"
#include "injnorm/linalg.hpp"

namespace injnorm {

namespace {

// Stream tags, so tensors and MPS locals never share a key.
constexpr std::uint64_t kTagGaussian = 0x67617573ULL;
constexpr std::uint64_t kTagMps = 0x6d707321ULL;

}  // namespace

std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Gaussian: return "gaussian";
    case ModelKind::GaussianSymmetrized: return "gaussian_symmetrized";
    case ModelKind::GaussianCyclic: return "gaussian_cyclic";
    case ModelKind::MPS: return "mps";
    case ModelKind::MPSTranslationInvariant: return "mps_ti";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view s) {
  if (s == "gaussian") return ModelKind::Gaussian;
  if (s == "gaussian_symmetrized" || s == "symmetrized") return ModelKind::GaussianSymmetrized;
  if (s == "gaussian_cyclic" || s == "cyclic") return ModelKind::GaussianCyclic;
  if (s == "mps") return ModelKind::MPS;
  if (s == "mps_ti" || s == "mps-ti") return ModelKind::MPSTranslationInvariant;
  throw SpecError("unknown model kind '" + std::string(s) + "'");
}

bool is_mps(ModelKind k) noexcept {
  return k == ModelKind::MPS || k == ModelKind::MPSTranslationInvariant;
}

void ModelSpec::validate() const {
  if (n < 2) throw SpecError("model order n must be >= 2");
  if (std::any_of(d.begin(), d.end(), [](auto x) { return x == 0; }) ||
      std::any_of(q.begin(), q.end(), [](auto x) { return x == 0; }))
    throw SpecError("dimensions must be >= 1");
  if (!is_mps(kind)) {
    if (!q.empty()) throw SpecError("non-MPS models carry no bond dimensions");
    if (d.empty() || std::any_of(d.begin(), d.end(), [&](auto x) { return x != d[0]; }))
      throw SpecError("Gaussian models need a single local dimension");
    if (d.size() != 1 && d.size() != n) throw SpecError("d must have 1 or n entries");
    return;
  }
  if (q.size() != n) throw SpecError("MPS models need exactly n bond dimensions");
  if (d.size() != 1 && d.size() != n) throw SpecError("d must have 1 or n entries");
  if (kind == ModelKind::MPSTranslationInvariant) {
    if (std::any_of(d.begin(), d.end(), [&](auto x) { return x != d[0]; }) ||
        std::any_of(q.begin(), q.end(), [&](auto x) { return x != q[0]; }))
      throw SpecError("translation-invariant MPS needs uniform d and q");
  }
}

std::size_t ModelSpec::local_dim(std::size_t site) const {
  return d.size() == 1 ? d[0] : d.at(site);
}

std::size_t ModelSpec::bond_dim(std::size_t site) const { return q.at(site % n); }

Shape ModelSpec::shape() const {
  Shape s(n);
  for (std::size_t k = 0; k < n; ++k) s[k] = local_dim(k);
  return s;
}

ModelSpec ModelSpec::auxiliary_gaussian() const {
  ModelSpec aux = *this;
  aux.kind = ModelKind::Gaussian;
  aux.d = {local_dim(0)};
  aux.q.clear();
  return aux;
}

void to_json(nlohmann::json& j, const ModelSpec& s) {
  j = nlohmann::json{{"kind", to_string(s.kind)},
                     {"field", to_string(s.field)},
                     {"n", s.n},
                     {"d", s.d.size() == 1 ? nlohmann::json(s.d[0]) : nlohmann::json(s.d)},
                     {"seed", s.seed.value}};
  if (!s.q.empty()) j["q"] = s.q;
}

void from_json(const nlohmann::json& j, ModelSpec& s) {
  auto dims = [](const nlohmann::json& v) {
    return v.is_array() ? v.get<std::vector<std::size_t>>()
                        : std::vector<std::size_t>{v.get<std::size_t>()};
  };
  s.kind = parse_model_kind(j.at("kind").get<std::string>());
  s.field = parse_field(j.value("field", std::string("real")));
  s.n = j.at("n").get<std::size_t>();
  s.d = dims(j.at("d"));
  s.q.clear();
  if (j.contains("q")) {
    s.q = dims(j.at("q"));
    if (s.q.size() == 1) s.q.assign(s.n, s.q[0]);
  }
  s.seed = Seed{j.value("seed", std::uint64_t{0})};
}

namespace {

template <class T>
std::vector<T> gaussian_entries(std::size_t count, double variance, std::uint64_t key) {
  GaussianStream stream(key);
  const double sigma = std::sqrt(variance);
  std::vector<T> out(count);
  if constexpr (std::is_same_v<T, double>) {
    for (auto& x : out) x = sigma * stream.next();
  } else {
    for (auto& x : out) {
      const double re = sigma * stream.next();
      const double im = sigma * stream.next();
      x = cplx(re, im) * (1.0 / std::numbers::sqrt2);
    }
  }
  return out;
}

DenseTensor gaussian_tensor(Shape shape, Field field, double variance, std::uint64_t key) {
  const auto count = shape_size(shape);
  if (field == Field::Real)
    return {std::move(shape), gaussian_entries<double>(count, variance, key)};
  return {std::move(shape), gaussian_entries<cplx>(count, variance, key)};
}

void require_kind(const ModelSpec& spec, std::initializer_list<ModelKind> allowed,
                  const char* op) {
  if (std::find(allowed.begin(), allowed.end(), spec.kind) == allowed.end())
    throw SpecError(std::string(op) + ": model kind " + std::string(to_string(spec.kind)) +
                    " not accepted");
  spec.validate();
}

}  // namespace

DenseTensor sample_gaussian(const ModelSpec& spec, Seed seed, std::uint64_t sample_index) {
  require_kind(spec, {ModelKind::Gaussian}, "sample_gaussian");
  const double variance = 2.0 / static_cast<double>(spec.local_dim(0));
  return gaussian_tensor(spec.shape(), spec.field, variance,
                         derive_key(seed, {kTagGaussian, sample_index}));
}

DenseTensor sample_symmetrized(const ModelSpec& spec, Seed seed, std::uint64_t sample_index) {
  require_kind(spec, {ModelKind::GaussianSymmetrized}, "sample_symmetrized");
  return symmetrize_full(sample_gaussian(spec.auxiliary_gaussian(), seed, sample_index));
}

DenseTensor sample_cyclic(const ModelSpec& spec, Seed seed, std::uint64_t sample_index) {
  require_kind(spec, {ModelKind::GaussianCyclic}, "sample_cyclic");
  return symmetrize_cyclic(sample_gaussian(spec.auxiliary_gaussian(), seed, sample_index));
}

DenseTensor sample_mps_local(std::size_t site, const ModelSpec& spec, Seed seed,
                             std::uint64_t sample_index) {
  require_kind(spec, {ModelKind::MPS, ModelKind::MPSTranslationInvariant}, "sample_mps_local");
  if (site >= spec.n) throw IndexError("MPS site index out of range");
  const std::size_t dk = spec.local_dim(site);
  const std::size_t ql = spec.bond_dim(site), qr = spec.bond_dim(site + 1);
  const double variance =
      2.0 / (static_cast<double>(dk) * std::sqrt(static_cast<double>(ql * qr)));
  const std::uint64_t key_site =
      spec.kind == ModelKind::MPSTranslationInvariant ? 0 : static_cast<std::uint64_t>(site);
  return gaussian_tensor({ql, dk, qr}, spec.field, variance,
                         derive_key(seed, {kTagMps, sample_index, key_site}));
}

DenseTensor assemble_mps(const std::vector<DenseTensor>& locals) {
  const std::size_t n = locals.size();
  if (n == 0) throw ShapeError("assemble_mps: no local tensors");
  const Field field = locals[0].field();
  Shape phys(n), bond(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& a = locals[k];
    if (a.order() != 3) throw ShapeError("MPS local tensors must have order 3");
    if (a.field() != field) throw FieldError("MPS local tensors mix fields");
    bond[k] = a.shape()[0];
    phys[k] = a.shape()[1];
  }
  for (std::size_t k = 0; k < n; ++k)
    if (locals[k].shape()[2] != bond[(k + 1) % n])
      throw ShapeError("bond dimension mismatch between sites " + std::to_string(k) + " and " +
                       std::to_string((k + 1) % n));

  if (field == Field::Real) {
    std::vector<std::span<const double>> views;
    for (const auto& a : locals) views.push_back(a.real_data());
    std::vector<double> out(shape_size(phys));
    kernels::mps_contract(views, phys, bond, out);
    return {phys, std::move(out)};
  }
  std::vector<std::span<const cplx>> views;
  for (const auto& a : locals) views.push_back(a.complex_data());
  std::vector<cplx> out(shape_size(phys));
  kernels::mps_contract(views, phys, bond, out);
  return {phys, std::move(out)};
}

DenseTensor sample_mps(const ModelSpec& spec, Seed seed, std::uint64_t sample_index) {
  require_kind(spec, {ModelKind::MPS, ModelKind::MPSTranslationInvariant}, "sample_mps");
  std::vector<DenseTensor> locals;
  locals.reserve(spec.n);
  for (std::size_t k = 0; k < spec.n; ++k)
    locals.push_back(sample_mps_local(k, spec, seed, sample_index));
  return assemble_mps(locals);
}

DenseTensor sample_model(const ModelSpec& spec, Seed seed, std::uint64_t sample_index) {
  switch (spec.kind) {
    case ModelKind::Gaussian: return sample_gaussian(spec, seed, sample_index);
    case ModelKind::GaussianSymmetrized: return sample_symmetrized(spec, seed, sample_index);
    case ModelKind::GaussianCyclic: return sample_cyclic(spec, seed, sample_index);
    case ModelKind::MPS:
    case ModelKind::MPSTranslationInvariant: return sample_mps(spec, seed, sample_index);
  }
  throw SpecError("unhandled model kind");
}

}  // namespace injnorm
