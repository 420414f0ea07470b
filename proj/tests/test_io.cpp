#include <clocale>
#include <filesystem>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "uforest/experiments.hpp"
#include "uforest/io.hpp"
#include "uforest/serialize.hpp"
#include "uforest/sim.hpp"
#include "uforest/svg.hpp"

using namespace uforest;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const auto dir = fs::temp_directory_path() / ("uforest_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Csv, ParsesLabeledExample) {
  const auto data = io::parse_csv("a,b,y\n0,1,K\n2,3,P");
  EXPECT_EQ(data.size(), 2u);
  EXPECT_EQ(data.dim(), 2u);
  EXPECT_EQ(data.feature_names, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(*data.labels, (std::vector<ClassLabel>{0, 1}));
  EXPECT_EQ(data.label_names, (std::vector<std::string>{"K", "P"}));
  EXPECT_EQ(data.features(1, 0), 2.0);
  EXPECT_EQ(data.features(1, 1), 3.0);
}

TEST(Csv, LabelCodesFollowFirstAppearance) {
  const auto data = io::parse_csv("x,type\n1,kc\n2,mbon\n3,kc\n4,pn\n", "type");
  EXPECT_EQ(*data.labels, (std::vector<ClassLabel>{0, 1, 0, 2}));
  EXPECT_EQ(data.label_names, (std::vector<std::string>{"kc", "mbon", "pn"}));
}

TEST(Csv, MissingLabelColumnGivesUnlabeled) {
  const auto data = io::parse_csv("a,b,c\n0,1,2\n3,4,5\n", "y");
  EXPECT_FALSE(data.labeled());
  EXPECT_EQ(data.dim(), 3u);
  const auto none = io::parse_csv("a,y\n0,1\n", std::nullopt);
  EXPECT_EQ(none.dim(), 2u);
}

TEST(Csv, QuotedCellsAndCrlf) {
  const auto data = io::parse_csv("\"a,1\",y\r\n1.5,\"x, y\"\r\n");
  EXPECT_EQ(data.feature_names[0], "a,1");
  EXPECT_EQ(data.label_names[0], "x, y");
  EXPECT_EQ(data.features(0, 0), 1.5);
}

TEST(Csv, Errors) {
  EXPECT_THROW(io::parse_csv(""), DataError);
  EXPECT_THROW(io::parse_csv("a,y\n"), DataError);
  EXPECT_THROW(io::load_csv("/nonexistent/file.csv"), DataError);
  EXPECT_THROW(io::parse_csv("a,y\n1,2,3\n"), DataError);
  EXPECT_THROW(io::parse_csv("a,y\ninf,1\n"), DataError);
  try {
    io::parse_csv("a,b,y\n1,2,K\n3,oops,P\n", "y", "f.csv");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("'b'"), std::string::npos) << msg;
  }
}

TEST(Csv, RoundTripIsByteIdentical) {
  for (auto kind : {sim::SettingKind::Spherical, sim::SettingKind::ThreeClass}) {
    const auto data = sim::sample({kind, 1.3, 0.4, 3}, 200, 5);
    const std::string text = io::format_csv(data);
    const auto back = io::parse_csv(text);
    EXPECT_EQ(back.features, data.features);
    // Codes follow first appearance in the file, so compare label names row by row.
    for (std::size_t i = 0; i < data.size(); ++i)
      EXPECT_EQ(back.label_names[(*back.labels)[i]], data.label_names[(*data.labels)[i]]);
    EXPECT_EQ(io::format_csv(back), text);
    EXPECT_EQ(io::parse_csv(text), back);
  }
  const auto dir = temp_dir();
  const auto data = sim::sample({sim::SettingKind::Elliptical, 1.0, 0.5, 2}, 50, 6);
  io::save_csv(data, dir / "sub" / "d.csv");
  EXPECT_EQ(io::format_csv(io::load_csv(dir / "sub" / "d.csv")), io::format_csv(data));
  fs::remove_all(dir);
}

TEST(Csv, LocaleIndependent) {
  // Parsing and formatting must not follow LC_NUMERIC.
  const char* old = std::setlocale(LC_NUMERIC, nullptr);
  const std::string saved = old ? old : "C";
  if (!std::setlocale(LC_NUMERIC, "de_DE.UTF-8")) std::setlocale(LC_NUMERIC, "C");
  const auto data = io::parse_csv("a,y\n0.25,K\n");
  EXPECT_EQ(data.features(0, 0), 0.25);
  EXPECT_EQ(io::format_csv(data), "a,y\n0.25,K\n");
  EXPECT_EQ(format_g17(0.5), "0.5");
  std::setlocale(LC_NUMERIC, saved.c_str());
}

TEST(Report, OneRowTwoLines) {
  EstimateReport r;
  r.estimator = "uf";
  r.n = 10;
  r.d = 1;
  r.h_y = std::log(2.0);
  r.h_y_given_x = 0.3;
  finish_mutual_information(r);
  const std::string text = io::format_report({io::SweepRow::from_report(r, 1.0, 0.5)});
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
  EXPECT_EQ(text.substr(0, text.find('\n')), io::kReportHeader);
}

TEST(Report, SweepLineCountAndRoundTrip) {
  experiments::SweepSpec spec;
  spec.n_grid = {100, 200, 300};
  spec.trials = 20;
  spec.seed = 3;
  spec.options.forest.n_trees = 3;
  const auto rows = experiments::run_sweep(spec);
  const auto dir = temp_dir();
  io::save_report(rows, dir / "sweep.csv");
  const std::string text = io::read_text(dir / "sweep.csv");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 61);
  EXPECT_EQ(io::load_report(dir / "sweep.csv"), rows);
  fs::remove_all(dir);
}

TEST(Report, NanCellsRoundTrip) {
  io::SweepRow row;
  row.estimator = "ksg";
  row.h_y = 0.1;
  const auto back = io::parse_report(io::format_report({row}));
  ASSERT_EQ(back.size(), 1u);
  EXPECT_TRUE(std::isnan(back[0].mu));
  EXPECT_EQ(back[0], row);
  EXPECT_THROW(io::parse_report("nope\n"), DataError);
  EXPECT_THROW(io::parse_report(std::string(io::kReportHeader) + "\nuf,1\n"), DataError);
}

TEST(Sweep, ThreadIndependentAndPaired) {
  experiments::SweepSpec spec;
  spec.n_grid = {150, 300};
  spec.mu_grid = {0.5, 1.0};
  spec.trials = 3;
  spec.estimators = {"uf", "ksg"};
  spec.options.forest.n_trees = 4;
  spec.options.threads = 1;
  const auto a = experiments::run_sweep(spec);
  spec.options.threads = 4;
  const auto b = experiments::run_sweep(spec);
  EXPECT_EQ(io::format_report(a), io::format_report(b));
  ASSERT_EQ(a.size(), 2u * 2 * 3 * 2);
  // Trial t uses the same data seed at every grid point.
  EXPECT_EQ(a[0].seed, a[6].seed);
  EXPECT_EQ(a[0].estimator, "uf");
  EXPECT_EQ(a[1].estimator, "ksg");
}

TEST(RunConfig, Validation) {
  io::RunConfig c;
  EXPECT_NO_THROW(c.validate());
  c.trials = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = io::RunConfig{};
  c.n_grid.clear();
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Serialize, ForestRoundTrip) {
  const auto data = sim::sample({sim::SettingKind::ThreeClass, 1.0, 1.0 / 3, 3}, 300, 7);
  for (auto mode : {EvalMode::TreeLevel, EvalMode::ForestLevel}) {
    ForestConfig c;
    c.n_trees = 4;
    c.eval_mode = mode;
    c.tree_params.max_depth = 6;
    const auto forest = fit_forest(data, c, 9, 1);
    const auto text = forest_to_json(forest).dump();
    const auto back = forest_from_json(nlohmann::json::parse(text));
    EXPECT_EQ(back, forest);
    EXPECT_EQ(forest_to_json(back).dump(), text);
    EXPECT_EQ(estimate_conditional_entropy(back, data.features, 1).h_y_given_x,
              estimate_conditional_entropy(forest, data.features, 1).h_y_given_x);
  }
}

TEST(Serialize, RejectsBadDocuments) {
  EXPECT_THROW(forest_from_json(nlohmann::json::parse(R"({"format":"other","version":1})")), DataError);
  EXPECT_THROW(forest_from_json(nlohmann::json::parse(R"({"format":"uforest-forest","version":99})")), DataError);
  EXPECT_THROW(tree_from_json(nlohmann::json::parse(R"({"format":"uforest-tree","version":1})")), DataError);
  const auto data = sim::sample({sim::SettingKind::Spherical, 1.0, 0.5, 1}, 60, 1);
  const auto tree = fit_tree(data, TreeParams{}, 1);
  EXPECT_EQ(tree_from_json(tree_to_json(tree)), tree);
}

TEST(Svg, RendersSeries) {
  svg::LinePlot plot{"title", "n", "value", {{"uf", {1, 2, 3}, {0.1, 0.2, 0.15}, true}, {"cart", {1, 2, 3}, {0.3, 0.1, 0.2}}}, true};
  const auto out = plot.render();
  EXPECT_EQ(out.rfind("<svg", 0), 0u);
  EXPECT_NE(out.find("</svg>"), std::string::npos);
  EXPECT_NE(out.find("uf"), std::string::npos);
  EXPECT_NE(out.find("polyline"), std::string::npos);
}
