#include "amm/cli.hpp"
#include "amm/closed_form.hpp"
#include "amm/menu_io.hpp"
#include "amm/run_config.hpp"
#include "amm/errors.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace amm;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path tmp(const std::string& name) { return std::filesystem::temp_directory_path() / ("amm_cli_" + name); }

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("closed-form menus") {
    const Result sym = run({"closed-form", "symmetric2d", "--lambda", "1"});
    CHECK(sym.code == 0);
    CHECK(sym.out.find("profit 0.2746005") != std::string::npos);
    CHECK(parse_menu(sym.out).size() == 9);

    const Result ba = run({"closed-form", "bidask1d", "--c", "0.5", "--lambda", "1"});
    CHECK(ba.code == 0);
    CHECK(ba.out.find("profit 0.125") != std::string::npos);
    CHECK(parse_menu(ba.out).size() == 3);

    const auto path = tmp("offcenter.menu");
    const Result off = run({"closed-form", "offcenter", "--out", path.string()});
    CHECK(off.code == 0);
    CHECK(read_menu_file(path).size() == 7);

    CHECK(run({"closed-form", "nonsense"}).code == kExitValidation);
    CHECK(run({"closed-form", "symmetric2d", "--lambda", "2"}).code == kExitValidation);
    CHECK(run({}).code == kExitValidation);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("eval") {
    const auto t1 = tmp("t1.menu");
    write_menu_file(t1, symmetric_2d_menu(1.0));
    const Result r = run({"eval", "--menu", t1.string(), "--n", "10000000", "--seed", "3"});
    REQUIRE(r.code == 0);
    double profit = 0, se = 0;
    std::istringstream in(r.out);
    std::string key;
    in >> key >> profit >> key >> se;
    CHECK(std::abs(profit - 0.274600502) < 4 * se);
    CHECK(r.out.find("zero_utility_at_belief ok") != std::string::npos);

    const auto none = tmp("none.menu");
    write_menu_file(none, Menu::no_trade(2));
    CHECK(run({"eval", "--menu", none.string(), "--n", "1000"}).out.rfind("profit 0\n", 0) == 0);

    const auto t3 = tmp("t3.menu");
    write_menu_file(t3, offcenter_menu());
    const Result off = run({"eval", "--menu", t3.string(), "--n", "10000000", "--c", "0.3333333333333333"});
    CHECK(off.out.find("separate_baseline 0.277777778") != std::string::npos);
    CHECK(off.out.find("exceeds_baseline yes") != std::string::npos);

    CHECK(run({"eval", "--menu", "/nonexistent.menu"}).code == kExitValidation);
}

TEST_CASE("heatmap export") {
    const auto t1 = tmp("hm.menu");
    write_menu_file(t1, symmetric_2d_menu(1.0));
    const Result small = run({"heatmap", "--menu", t1.string(), "--grid", "3"});
    REQUIRE(small.code == 0);
    const auto rows = csv_rows(small.out);
    REQUIRE(rows.size() == 10);
    CHECK(small.out.rfind("x1,x2,item,alloc1,alloc2,payment,utility\n", 0) == 0);
    CHECK(rows[5][0] == "0.5");
    CHECK(rows[5][1] == "0.5");
    CHECK(rows[5][2] == "0");

    const auto out = tmp("hm.csv");
    REQUIRE(run({"heatmap", "--menu", t1.string(), "--grid", "101", "--out", out.string()}).code == 0);
    const auto fine = csv_rows(slurp(out));
    REQUIRE(fine.size() == 101 * 101 + 1);
    const auto& cell = fine[1 + 90 * 101 + 50];
    CHECK(cell[0] == "0.9");
    CHECK(cell[1] == "0.5");
    CHECK(cell[3] == "1");
    CHECK(cell[4] == "0");
    CHECK(cell[5] == "0.833333333");

    const auto half = tmp("half.menu");
    write_menu_file(half, symmetric_2d_menu(0.5));
    const auto hcsv = tmp("half.csv");
    REQUIRE(run({"heatmap", "--menu", half.string(), "--grid", "101", "--out", hcsv.string()}).code == 0);
    auto count_zero = [](const std::vector<std::vector<std::string>>& rs) {
        std::size_t n = 0;
        for (std::size_t i = 1; i < rs.size(); ++i) n += rs[i][2] == "0";
        return n;
    };
    CHECK(count_zero(csv_rows(slurp(hcsv))) >= count_zero(fine));

    CHECK(run({"heatmap", "--menu", t1.string(), "--grid", "1"}).code == kExitValidation);
    CHECK(run({"heatmap", "--menu", t1.string(), "--out", "/nonexistent/dir/x.csv"}).code == kExitValidation);

    const auto m3 = tmp("m3.menu");
    write_menu_file(m3, Menu(3, {{{0, 0, 0}, 0.0}, {{1, 1, 1}, 2.0}}));
    CHECK(run({"heatmap", "--menu", m3.string(), "--grid", "5"}).code == kExitValidation);
    const Result sl = run({"heatmap", "--menu", m3.string(), "--grid", "5", "--slice", "x3=1"});
    CHECK(sl.code == 0);
    CHECK(csv_rows(sl.out).size() == 26);
}

TEST_CASE("certify") {
    const Result r = run({"certify", "--family", "symmetric2d", "--lambda", "1", "--n", "10000000"});
    CHECK(r.code == 0);
    CHECK(r.out.find("cost 0.274600502") != std::string::npos);
    CHECK(r.out.find("verdict certified-optimal") != std::string::npos);

    const auto none = tmp("none2.menu");
    write_menu_file(none, Menu::no_trade(2));
    const Result n = run({"certify", "--menu", none.string(), "--n", "1000"});
    CHECK(n.out.find("weak_duality pass") != std::string::npos);
    CHECK(n.out.find("verdict not-certified") != std::string::npos);

    const Result one = run({"certify", "--family", "bidask1d", "--c", "0.3", "--lambda", "0.5", "--n", "2000000"});
    CHECK(one.out.find("verdict certified-optimal") != std::string::npos);

    CHECK(run({"certify", "--family", "cube"}).code == kExitValidation);
}

TEST_CASE("measure") {
    const Result r = run({"measure", "--lambda", "1", "--c", "0.5,0.5"});
    CHECK(r.code == 0);
    CHECK(r.out.find("interior -3\n") != std::string::npos);
    CHECK(r.out.find("face x1=0 0.5\n") != std::string::npos);
    CHECK(r.out.find("points 1\n") != std::string::npos);

    const auto t2 = tmp("t2.menu");
    write_menu_file(t2, symmetric_2d_menu(0.5));
    const Result lin = run({"measure", "--menu", t2.string(), "--lambda", "0.5", "--n", "1000000"});
    CHECK(lin.code == 0);
    CHECK(lin.out.find("integral_u 0.09285") != std::string::npos);
}

TEST_CASE("compare") {
    const Result r = run({"compare", "--lambda", "1,0.4714045207910317"});
    CHECK(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[1][4].rfind("0.0984", 0) == 0);
    CHECK(rows[2][4].rfind("0.114", 0) == 0);
}

TEST_CASE("train writes checkpoint, menu and log") {
    const auto prefix = tmp("train");
    const std::vector<std::string> args{"train",     "--d",          "1",     "--menu_size", "8",
                                        "--batch",   "512",          "--steps", "40",        "--lr",
                                        "0.01",      "--log-every",  "20",    "--log-samples", "10000",
                                        "--out",     prefix.string()};
    const Result a = run(args);
    REQUIRE(a.code == 0);
    const std::string log_a = slurp(prefix.string() + ".log.csv");
    const std::string menu_a = slurp(prefix.string() + ".menu");
    CHECK(std::filesystem::exists(prefix.string() + ".ckpt.raw"));
    CHECK(log_a.rfind("step,soft_objective,hard_profit,hard_se\n", 0) == 0);
    const Result b = run(args);
    CHECK(a.out == b.out);
    CHECK(slurp(prefix.string() + ".log.csv") == log_a);
    CHECK(slurp(prefix.string() + ".menu") == menu_a);

    CHECK(run({"train", "--temp", "-1"}).code == kExitValidation);
    CHECK(run({"train", "--steps", "abc"}).code == kExitValidation);
}

TEST_CASE("config files merge with flags") {
    const auto cfg_path = tmp("run.cfg");
    {
        std::ofstream f(cfg_path);
        f << "# comment\nlambda = 0.5\nc=0.5,0.5  # trailing\n";
    }
    const RunConfig cfg = RunConfig::from_file(cfg_path);
    CHECK(cfg.get_double("lambda", 1.0) == 0.5);
    CHECK(cfg.get_vector("c", {}) == std::vector<double>{0.5, 0.5});
    CHECK(cfg.get_size("steps", 17) == 17);

    const Result from_file = run({"closed-form", "symmetric2d", "--config", cfg_path.string()});
    CHECK(from_file.out.find("profit 0.0928563913") != std::string::npos);
    const Result flag_wins = run({"closed-form", "symmetric2d", "--config", cfg_path.string(), "--lambda", "1"});
    CHECK(flag_wins.out.find("profit 0.274600502") != std::string::npos);

    std::istringstream bad("nonsense=1\n");
    CHECK_THROWS_AS(RunConfig::parse(bad), ValidationError);
    std::istringstream noeq("lambda\n");
    CHECK_THROWS_AS(RunConfig::parse(noeq), ValidationError);
}

TEST_CASE("identical invocations give identical output") {
    const auto t1 = tmp("det.menu");
    write_menu_file(t1, offcenter_menu());
    const std::vector<std::string> args{"eval", "--menu", t1.string(), "--n", "200000", "--seed", "11"};
    CHECK(run(args).out == run(args).out);
}
