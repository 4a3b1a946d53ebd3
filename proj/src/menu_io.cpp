#include "amm/menu_io.hpp"

#include "amm/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace amm {

std::vector<std::vector<double>> read_numeric_rows(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::vector<double> row;
        std::string tok;
        while (fields >> tok) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw ValidationError("line " + std::to_string(line_no) + ": bad number '" + tok + "'");
            }
        }
        if (row.empty()) continue;
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ValidationError("line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(rows.front().size()) + " columns, got " + std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Menu read_menu(std::istream& in) {
    const auto rows = read_numeric_rows(in);
    if (rows.empty()) throw ValidationError("menu file has no items");
    if (rows.front().size() < 2) throw ValidationError("menu rows need at least one allocation and a price");
    const std::size_t d = rows.front().size() - 1;
    std::vector<MenuItem> items;
    std::size_t no_trade = rows.size();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        MenuItem it{{rows[r].begin(), rows[r].end() - 1}, rows[r].back()};
        bool zero = it.price == 0.0;
        for (double a : it.alloc) zero = zero && a == 0.0;
        if (zero && no_trade == rows.size()) no_trade = r;
        items.push_back(std::move(it));
    }
    if (no_trade == rows.size()) throw ValidationError("menu file lacks the mandatory no-trade row");
    std::rotate(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(no_trade),
                items.begin() + static_cast<std::ptrdiff_t>(no_trade) + 1);
    return Menu(d, items);
}

Menu read_menu_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open menu file " + path.string());
    return read_menu(in);
}

Menu parse_menu(const std::string& text) {
    std::istringstream in(text);
    return read_menu(in);
}

void write_menu(std::ostream& out, const Menu& menu, const std::string& comment) {
    if (!comment.empty()) {
        std::istringstream lines(comment);
        std::string line;
        while (std::getline(lines, line)) out << "# " << line << '\n';
    }
    out << "#";
    for (std::size_t k = 0; k < menu.dim(); ++k) out << " a_" << (k + 1);
    out << " price\n";
    char buf[32];
    for (std::size_t i = 0; i < menu.size(); ++i) {
        for (double a : menu.alloc(i)) {
            std::snprintf(buf, sizeof buf, "%.17g", a);
            out << buf << ' ';
        }
        std::snprintf(buf, sizeof buf, "%.17g", menu.price(i));
        out << buf << '\n';
    }
}

void write_menu_file(const std::filesystem::path& path, const Menu& menu, const std::string& comment) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write menu file " + path.string());
    write_menu(out, menu, comment);
    if (!out) throw ValidationError("failed writing menu file " + path.string());
}

}  // namespace amm
