#include "ktb/problems/golden.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include <json.hpp>

#include "ktb/errors.hpp"

namespace ktb::problems {
namespace {

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return __builtin_bswap64(v);
  }
}

}  // namespace

void write_golden(const std::filesystem::path& path, const Tensor& tensor) {
  nlohmann::json header;
  header["dtype"] = "<f8";
  header["shape"] = tensor.shape();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("write_golden: cannot open " + path.string());
  out << header.dump() << '\n';
  for (Index i = 0; i < tensor.size(); ++i) {
    const std::uint64_t bits = to_le(std::bit_cast<std::uint64_t>(tensor[i]));
    out.write(reinterpret_cast<const char*>(&bits), sizeof(bits));
  }
  if (!out) throw Error("write_golden: write failed for " + path.string());
}

Tensor read_golden(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("read_golden: cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  const auto header = nlohmann::json::parse(line);
  if (header.at("dtype") != "<f8") throw InvalidInputError("read_golden: unsupported dtype");
  const Shape shape = header.at("shape").get<Shape>();
  Tensor t(shape);
  for (Index i = 0; i < t.size(); ++i) {
    std::uint64_t bits = 0;
    in.read(reinterpret_cast<char*>(&bits), sizeof(bits));
    if (!in) throw InvalidInputError("read_golden: truncated payload in " + path.string());
    t[i] = std::bit_cast<double>(to_le(bits));
  }
  return t;
}

}  // namespace ktb::problems
