#pragma once

#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace hjdebt {

inline constexpr const char* kVersion = "0.3.0";

/// Round-trip exact decimal form (17 significant digits); inf/nan spelled out.
std::string format_double(double v);

/// FNV-1a 64-bit hash rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

/// Minimal CSV emitter; numbers go through format_double.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    /// Writes "# key: value" preamble lines.
    void comment(const std::string& key, const std::string& value);
    void header(std::initializer_list<std::string_view> cols);
    void header(const std::vector<std::string>& cols);
    void row(std::initializer_list<double> values);
    void row(const std::vector<double>& values);
    /// Mixed row: preformatted cells.
    void raw_row(const std::vector<std::string>& cells);

private:
    std::ostream& os_;
};

}  // namespace hjdebt
