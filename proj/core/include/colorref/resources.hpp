#pragma once

#include <string>
#include <string_view>

namespace colorref {

/// Contents of a bundled data file (compiled into the library), looked up by
/// file name, e.g. "zh_words.txt". Throws DataError for unknown names.
std::string_view bundled_resource(std::string_view name);

/// Reads a whole file into memory. Throws DataError if it cannot be opened.
std::string read_file(const std::string& path);

}  // namespace colorref
