#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "qtwist/config.hpp"
#include "qtwist/errors.hpp"

using namespace qtwist;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("no file and no flags gives the defaults") {
  const auto c = parse_config(Subcommand::sweep, std::nullopt, {});
  CHECK(c.X == 1000.0);
  CHECK(c.l == 1);
  CHECK(c.P == 100000);
  CHECK(c.grid == std::vector<double>{1000, 2000, 4000, 8000});
  CHECK(c.l_list == std::vector<std::int64_t>{1, 3, 5, 7});
  CHECK(c.kernel == Kernel::unit);
  CHECK(c.route == AfeRoute::product);
  CHECK(c.constant_form == ConstantForm::proof_form);
  CHECK(c.tol.slope == 0.25);
  CHECK(c.explicit_keys.empty());
}

TEST_CASE("flags override file values") {
  const auto f = write_temp("qtwist_cfg_a.txt", "# sweep settings\nX = 4000\nl=3   # twist\n\nshards = 4\n");
  const auto c = parse_config(Subcommand::sweep, f, {{"X", "8000"}});
  CHECK(c.X == 8000.0);
  CHECK(c.l == 3);
  CHECK(c.shards == 4);
  CHECK(c.is_explicit("X"));
  CHECK(c.is_explicit("shards"));
  CHECK(!c.is_explicit("grid"));
  std::filesystem::remove(f);
}

TEST_CASE("lists and tolerances") {
  const auto c = parse_config(Subcommand::report, std::nullopt,
                              {{"grid", "500,1000,2000"}, {"l_list", "3,15"}, {"tol_twist", "0.2"}});
  CHECK(c.grid == std::vector<double>{500, 1000, 2000});
  CHECK(c.l_list == std::vector<std::int64_t>{3, 15});
  CHECK(c.tol.twist == 0.2);
}

TEST_CASE("invalid values are usage errors") {
  CHECK_THROWS_AS(parse_config(Subcommand::sweep, std::nullopt, {{"l", "4"}}), UsageError);
  CHECK_THROWS_AS(parse_config(Subcommand::sweep, std::nullopt, {{"bogus", "1"}}), UsageError);
  CHECK_THROWS_AS(parse_config(Subcommand::sweep, std::nullopt, {{"X", "abc"}}), UsageError);
  CHECK_THROWS_AS(parse_config(Subcommand::fit, std::nullopt, {{"grid", "1000,2000"}}), UsageError);
  CHECK_THROWS_AS(parse_config(Subcommand::euler_verify, std::nullopt, {{"a_max", "200000"}}), UsageError);
  CHECK_THROWS_AS(parse_config(Subcommand::sweep, std::nullopt, {{"kernel", "gaussian"}}), UsageError);
  CHECK_THROWS_AS(parse_config(Subcommand::sweep, std::nullopt, {{"l_list", "1,2"}}), UsageError);
  CHECK_NOTHROW(parse_config(Subcommand::gauss_verify, std::nullopt, {{"kernel", "gaussian"}}));
  CHECK_THROWS_AS(parse_config(Subcommand::sweep, std::filesystem::path("/nonexistent/q.cfg"), {}), UsageError);
}

TEST_CASE("malformed config text reports the line") {
  try {
    parse_config_text("X = 100\n\nthis line has no equals\n");
    FAIL("expected a usage error");
  } catch (const UsageError& e) {
    CHECK(std::string(e.what()).find("config:3:") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config_text("X = 1\nX = 2\n"), UsageError);
  CHECK_THROWS_AS(parse_config_text("= 5\n"), UsageError);
  CHECK_THROWS_AS(parse_config_text("X =\n"), UsageError);
  const auto m = parse_config_text("  X = 100  # c\n# only comment\nl = 3\n");
  CHECK(m.at("X") == "100");
  CHECK(m.at("l") == "3");
}

TEST_CASE("subcommand names") {
  for (auto s : {Subcommand::tau, Subcommand::gauss_verify, Subcommand::poisson_verify, Subcommand::lvalue,
                 Subcommand::euler_verify, Subcommand::sweep, Subcommand::fit, Subcommand::report})
    CHECK(parse_subcommand(subcommand_name(s)) == s);
  CHECK_THROWS_AS(parse_subcommand("plot"), UsageError);
  CHECK(!config_key_help().empty());
}
