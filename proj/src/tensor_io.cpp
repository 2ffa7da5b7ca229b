#include "injnorm/tensor_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace injnorm {

namespace {

constexpr std::array<char, 4> kMagic{'I', 'N', 'J', 'T'};

template <class U>
void put_le(std::ostream& os, U value) {
  std::array<char, sizeof(U)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(U));
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(bytes.begin(), bytes.end());
  os.write(bytes.data(), bytes.size());
}

template <class U>
U get_le(std::istream& is) {
  std::array<char, sizeof(U)> bytes;
  if (!is.read(bytes.data(), bytes.size())) throw FormatError("truncated tensor stream");
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(bytes.begin(), bytes.end());
  U value;
  std::memcpy(&value, bytes.data(), sizeof(U));
  return value;
}

}  // namespace

void write_tensor(std::ostream& os, const DenseTensor& t) {
  if (t.order() > 255) throw FormatError("tensor order exceeds container limit");
  os.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(os, kTensorFormatVersion);
  put_le<std::uint8_t>(os, static_cast<std::uint8_t>(t.field()));
  put_le<std::uint8_t>(os, static_cast<std::uint8_t>(t.order()));
  for (auto d : t.shape()) {
    if (d > 0xFFFFFFFFULL) throw FormatError("axis length exceeds u32");
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(d));
  }
  t.visit([&](auto data) {
    for (const auto& x : data) {
      const cplx z(x);
      put_le<double>(os, z.real());
      put_le<double>(os, z.imag());
    }
  });
  if (!os) throw FormatError("failed writing tensor stream");
}

DenseTensor read_tensor(std::istream& is) {
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kMagic)
    throw FormatError("bad magic: not an INJT tensor file");
  const auto version = get_le<std::uint32_t>(is);
  if (version != kTensorFormatVersion)
    throw FormatError("unsupported tensor format version " + std::to_string(version));
  const auto field_tag = get_le<std::uint8_t>(is);
  if (field_tag > 1) throw FormatError("unknown field tag");
  const auto n = get_le<std::uint8_t>(is);
  if (n == 0) throw FormatError("tensor order must be >= 1");
  Shape shape(n);
  for (auto& d : shape) {
    d = get_le<std::uint32_t>(is);
    if (d == 0) throw FormatError("zero-length axis in tensor file");
  }
  const auto count = shape_size(shape);
  if (static_cast<Field>(field_tag) == Field::Real) {
    std::vector<double> data(count);
    for (auto& x : data) {
      x = get_le<double>(is);
      if (get_le<double>(is) != 0.0) throw FormatError("real tensor with nonzero imaginary part");
    }
    return {std::move(shape), std::move(data)};
  }
  std::vector<cplx> data(count);
  for (auto& z : data) {
    const double re = get_le<double>(is);
    z = cplx(re, get_le<double>(is));
  }
  return {std::move(shape), std::move(data)};
}

void save_tensor(const std::filesystem::path& path, const DenseTensor& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  write_tensor(os, t);
}

DenseTensor load_tensor(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  return read_tensor(is);
}

nlohmann::json tensor_to_json(const DenseTensor& t) {
  nlohmann::json j;
  j["field"] = to_string(t.field());
  j["shape"] = t.shape();
  if (t.is_real()) {
    const auto d = t.real_data();
    j["re"] = std::vector<double>(d.begin(), d.end());
    return j;
  }
  std::vector<double> re, im;
  for (auto z : t.complex_data()) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  j["re"] = re;
  j["im"] = im;
  return j;
}

DenseTensor tensor_from_json(const nlohmann::json& j) {
  try {
    const Field field = parse_field(j.at("field").get<std::string>());
    auto shape = j.at("shape").get<Shape>();
    auto re = j.at("re").get<std::vector<double>>();
    if (field == Field::Real) return {std::move(shape), std::move(re)};
    const auto im = j.at("im").get<std::vector<double>>();
    if (im.size() != re.size()) throw FormatError("re/im length mismatch");
    std::vector<cplx> data(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) data[i] = cplx(re[i], im[i]);
    return {std::move(shape), std::move(data)};
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed tensor JSON: ") + e.what());
  }
}

}  // namespace injnorm
