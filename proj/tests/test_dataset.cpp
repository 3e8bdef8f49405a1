#include <cmath>
#include <fstream>
#include <sstream>

#include "cms/dataset.hpp"
#include "cms/errors.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

using namespace cms;

namespace {

ExampleModel model() { return builtin_example_model(); }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("x3 sweep of p1 over [-60,60] step 1 has 121 rows") {
  const ExampleModel m = model();
  const ConflictTable t =
      generate_table(m.xapp(XAppId{"x3"}), m.kpi_models, ParamId{"p1"},
                     ParamRange{-60.0, 60.0, 1.0}, {{ParamId{"p4"}, 10.0}});
  CHECK(t.size() == 121);
  CHECK(t.swept == ParamId{"p1"});
  CHECK(t.xapp == XAppId{"x3"});

  // the row where the numerator vanishes holds the amplitude
  const auto sv = t.swept_values();
  const auto col = t.kpi_column(KpiId{"k3"});
  for (std::size_t i = 0; i < sv.size(); ++i) {
    if (sv[i] == -45.0) CHECK(col[i] == 120.0);
  }
}

TEST_CASE("k1 value frozen against an independent evaluation") {
  // 80 * exp(-(10)^2 / (2 * 10^2)) = 80 * exp(-1/2); computed separately
  const ExampleModel m = model();
  const ConflictTable t =
      generate_table(m.xapp(XAppId{"x1"}), m.kpi_models, ParamId{"p1"},
                     ParamRange{-60.0, 60.0, 1.0}, {{ParamId{"p2"}, 10.0}});
  const auto sv = t.swept_values();
  const auto col = t.kpi_column(KpiId{"k1"});
  bool found = false;
  for (std::size_t i = 0; i < sv.size(); ++i) {
    if (sv[i] == 10.0) {
      CHECK(col[i] == doctest::Approx(48.52245277701067).epsilon(1e-12));
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("generation is deterministic") {
  const ExampleModel m = model();
  const Assignment fixed{{ParamId{"p2"}, 27.0}, {ParamId{"p3"}, -20.0}};
  const auto a = generate_table(m.xapp(XAppId{"x2"}), m.kpi_models, ParamId{"p1"},
                                ParamRange{-60.0, 60.0, 1.0}, fixed);
  const auto b = generate_table(m.xapp(XAppId{"x2"}), m.kpi_models, ParamId{"p1"},
                                ParamRange{-60.0, 60.0, 1.0}, fixed);
  CHECK(a == b);
}

TEST_CASE("generate preconditions") {
  const ExampleModel m = model();
  // p3 missing from fixed while k2 references it
  CHECK_THROWS_AS(generate_table(m.xapp(XAppId{"x2"}), m.kpi_models, ParamId{"p1"},
                                 ParamRange{-10.0, 10.0, 1.0}, {{ParamId{"p2"}, 27.0}}),
                  MissingParam);
  // p7 affects no KPI of x1
  CHECK_THROWS_AS(generate_table(m.xapp(XAppId{"x1"}), m.kpi_models, ParamId{"p7"},
                                 ParamRange{-10.0, 10.0, 1.0}, {{ParamId{"p2"}, 27.0}}),
                  ConfigError);
  // single-point grid cannot form a table
  CHECK_THROWS_AS(generate_table(m.xapp(XAppId{"x1"}), m.kpi_models, ParamId{"p1"},
                                 ParamRange{0.0, 0.0, 1.0}, {{ParamId{"p2"}, 27.0}}),
                  ParseError);
}

TEST_CASE("save/load round-trip is stable at 9 significant digits") {
  const ExampleModel m = model();
  const ConflictTable t =
      generate_table(m.xapp(XAppId{"x4"}), m.kpi_models, ParamId{"p2"},
                     ParamRange{1.0, 40.0, 1.0},
                     {{ParamId{"p5"}, 10.0}, {ParamId{"p6"}, 15.0}});

  const auto dir = cms::testing::temp_dir();
  const auto f1 = dir / "x4_p2_a.csv";
  const auto f2 = dir / "x4_p2_b.csv";
  save_table(t, f1);
  const ConflictTable loaded = load_table(f1);
  save_table(loaded, f2);
  CHECK(slurp(f1) == slurp(f2));  // printing the loaded table reproduces the file
  CHECK(loaded.xapp == t.xapp);
  CHECK(loaded.swept == t.swept);
  CHECK(loaded.kpi_ids == t.kpi_ids);
  CHECK(loaded.size() == t.size());

  const ConflictTable again = load_table(f2);
  CHECK(again == loaded);  // exact fixed point after one print/parse cycle
}

TEST_CASE("schema violations are reported with the missing column") {
  const auto dir = cms::testing::temp_dir();
  const auto f = dir / "missing_kpi.csv";
  {
    std::ofstream out(f);
    out << "# cms-table v1\n# xapp: x4\n# kpis: k41 k42\n";
    out << "p2,p5,p6,k41\n";
    out << "1,10,15,0.5\n2,10,15,0.6\n";
  }
  try {
    load_table(f);
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(std::string(e.what()).find("k42") != std::string::npos);
    REQUIRE(e.missing_columns.size() == 1);
    CHECK(e.missing_columns[0] == "k42");
  }

  // validate_against_spec also names the absent KPI
  const ExampleModel m = model();
  ConflictTable t =
      generate_table(m.xapp(XAppId{"x4"}), m.kpi_models, ParamId{"p2"},
                     ParamRange{1.0, 10.0, 1.0}, {{ParamId{"p5"}, 10.0}, {ParamId{"p6"}, 15.0}});
  t.kpi_ids.pop_back();
  for (auto& row : t.rows) row.kpis.erase(KpiId{"k42"});
  CHECK_THROWS_AS(validate_against_spec(t, m.xapp(XAppId{"x4"})), SchemaError);
}

TEST_CASE("table ownership is checked") {
  const ExampleModel m = model();
  const ConflictTable t =
      generate_table(m.xapp(XAppId{"x1"}), m.kpi_models, ParamId{"p1"},
                     ParamRange{-5.0, 5.0, 1.0}, {{ParamId{"p2"}, 10.0}});
  CHECK_THROWS_AS(validate_against_spec(t, m.xapp(XAppId{"x2"})), SchemaError);
  CHECK_NOTHROW(validate_against_spec(t, m.xapp(XAppId{"x1"})));
}

TEST_CASE("non-monotone swept column is a parse error, descending is canonicalized") {
  const auto dir = cms::testing::temp_dir();

  const auto bad = dir / "non_monotone.csv";
  {
    std::ofstream out(bad);
    out << "# cms-table v1\n# xapp: x1\n# kpis: k1\n";
    out << "p1,p2,k1\n";
    out << "0,10,80\n2,10,78\n1,10,79\n";
  }
  CHECK_THROWS_AS(load_table(bad), ParseError);

  const auto desc = dir / "descending.csv";
  {
    std::ofstream out(desc);
    out << "# cms-table v1\n# xapp: x1\n# kpis: k1\n";
    out << "p1,p2,k1\n";
    out << "2,10,78\n1,10,79\n0,10,80\n";
  }
  const ConflictTable t = load_table(desc);
  CHECK(t.swept_values() == std::vector<double>{0.0, 1.0, 2.0});
  CHECK(t.kpi_column(KpiId{"k1"}) == std::vector<double>{80.0, 79.0, 78.0});
}

TEST_CASE("malformed rows carry line locations") {
  const auto dir = cms::testing::temp_dir();
  const auto f = dir / "ragged.csv";
  {
    std::ofstream out(f);
    out << "# cms-table v1\n# xapp: x1\n# kpis: k1\n";
    out << "p1,p2,k1\n";
    out << "0,10,80\n1,10\n";
  }
  try {
    load_table(f);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 6);
  }
}

TEST_CASE("column mapping adapts externally named files") {
  const auto dir = cms::testing::temp_dir();
  const auto f = dir / "external.csv";
  {
    std::ofstream out(f);
    out << "Parameter2,P5,P6,KPI_41,KPI_42\n";
    out << "1,10,15,0.5,0.7\n2,10,15,0.6,0.8\n";
  }
  const std::map<std::string, std::string> mapping{
      {"Parameter2", "p2"}, {"P5", "p5"},   {"P6", "p6"},
      {"KPI_41", "k41"},    {"KPI_42", "k42"},
      {"#xapp", "x4"},      {"#swept", "p2"},
      // the mapping also declares which columns are KPIs
      {"#kpis", "k41 k42"},
  };
  // KPI identity flows through "# kpis" metadata; the loader needs it in the
  // mapping when the file has none.
  CHECK_THROWS_AS(load_table(f), ParseError);

  std::map<std::string, std::string> with_kpis = mapping;
  const ConflictTable t = load_table(f, with_kpis);
  CHECK(t.xapp == XAppId{"x4"});
  CHECK(t.swept == ParamId{"p2"});
  CHECK(t.kpi_column(KpiId{"k41"}) == std::vector<double>{0.5, 0.6});
}

}  // TEST_SUITE
