#pragma once

#include <filesystem>
#include <iosfwd>

#include <json.hpp>

#include "injnorm/tensor.hpp"

namespace injnorm {

// Binary container, all integers and floats little-endian:
//   "INJT" | version u32 | field u8 | n u8 | dims u32 x n | (re f64, im f64) x prod(dims)
// Entries are row-major. Real tensors are written with im = 0.
inline constexpr std::uint32_t kTensorFormatVersion = 1;

void write_tensor(std::ostream& os, const DenseTensor& t);
DenseTensor read_tensor(std::istream& is);

void save_tensor(const std::filesystem::path& path, const DenseTensor& t);
DenseTensor load_tensor(const std::filesystem::path& path);

/// JSON text form: {"field": "real"|"complex", "shape": [...], "re": [...], "im": [...]}.
/// "im" is omitted for real tensors.
nlohmann::json tensor_to_json(const DenseTensor& t);
DenseTensor tensor_from_json(const nlohmann::json& j);

}  // namespace injnorm
