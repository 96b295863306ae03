#include "colorref/resources.hpp"

#include <fstream>
#include <optional>
#include <sstream>

#include "colorref/error.hpp"

namespace colorref {
namespace detail {
std::optional<std::string_view> find_embedded(std::string_view name);
}

std::string_view bundled_resource(std::string_view name) {
  if (auto data = detail::find_embedded(name)) return *data;
  throw DataError("no bundled resource named '" + std::string(name) + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace colorref
