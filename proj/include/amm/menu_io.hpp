#pragma once

#include "amm/mechanism.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace amm {

// Plain-text menu format: one item per line as `a_1 ... a_d price`,
// whitespace separated, `#` starts a comment. The no-trade row is mandatory;
// on read it is moved to index 0 so indifference resolves to no trade.
Menu read_menu(std::istream& in);
Menu read_menu_file(const std::filesystem::path& path);
Menu parse_menu(const std::string& text);

void write_menu(std::ostream& out, const Menu& menu, const std::string& comment = {});
void write_menu_file(const std::filesystem::path& path, const Menu& menu, const std::string& comment = {});

// Reads whitespace-separated numeric rows with `#` comments; all rows must
// have the same width. Shared by the menu and checkpoint formats.
std::vector<std::vector<double>> read_numeric_rows(std::istream& in);

}  // namespace amm
