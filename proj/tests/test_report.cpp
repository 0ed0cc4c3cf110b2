#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <regex>

#include "suffstat/report.hpp"

using namespace suffstat;

TEST_CASE("format_double uses fixed significant digits") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0 / 3.0) == "0.333333333333");
  CHECK(format_double(2.0 / 3.0, 17) == "0.66666666666666663");
  CHECK(std::stod(format_double(0.1 + 0.2, 17)) == 0.1 + 0.2);
}

TEST_CASE("json writer is stable and maps non-finite values to null") {
  Json j;
  j["b"] = 1.0 / 3.0;
  j["a"] = std::numeric_limits<double>::infinity();
  j["n"] = 3;
  j["s"] = "x\"y";
  j["list"] = Json::array({1.5, false});
  j["empty"] = Json::object();
  const auto text = dump_json(j);
  CHECK(text == dump_json(j));
  CHECK(text.find("\"b\": 0.333333333333") != std::string::npos);
  CHECK(text.find("\"a\": null") != std::string::npos);
  CHECK(text.find("\"s\": \"x\\\"y\"") != std::string::npos);
  CHECK(text.find("\"b\"") < text.find("\"a\""));
  CHECK(Json::parse(text)["n"] == 3);
}

TEST_CASE("records csv layout") {
  ScatterSeries s;
  s.per_model.push_back({0, "tree", 0.5, 0.75, {}});
  s.averaged.push_back({0, "averaged", 0.5, 0.8, "a,b"});
  const auto csv = records_csv("exp1-subsets", s);
  CHECK(csv == "experiment,id,model,note,effect_size,outcome\n"
               "exp1-subsets,0,tree,,0.5,0.75\n"
               "exp1-subsets,0,averaged,\"a,b\",0.5,0.8\n");
  s.has_abs = true;
  s.per_model[0].outcome = -0.25;
  CHECK(records_csv("exp2", s).find("exp2,0,tree,,0.5,-0.25,0.25\n") != std::string::npos);
}

TEST_CASE("effect report outputs") {
  EffectReport r;
  r.label_name = "income";
  r.per_feature.push_back({"age", ColumnKind::numeric, -0.5, 0.5, false, false});
  r.per_feature.push_back({"job", ColumnKind::categorical, 1.0, 1.0 * kLogOddsToD, false, true});
  r.excluded.push_back({"const", "single level"});
  r.average = (0.5 + kLogOddsToD) / 2;
  const auto csv = effect_report_csv(r);
  CHECK(csv.rfind("feature,kind,raw,magnitude,flags\nage,numeric,-0.5,0.5,\n", 0) == 0);
  CHECK(csv.find("job,categorical,1,0.551328895422,zero-cell-corrected\n") != std::string::npos);
  CHECK(csv.find("const,excluded,,,single level\n") != std::string::npos);
  const auto j = Json::parse(dump_json(effect_report_json(r)));
  CHECK(j["features"].size() == 2);
  CHECK(j["excluded"][0]["reason"] == "single level");
}

TEST_CASE("scatter svg carries the summary r squared") {
  std::vector<ScatterRecord> recs;
  std::vector<double> x, y;
  for (int i = 0; i < 10; ++i) {
    const double e = 0.1 * i, o = 0.7 + 0.01 * ((i * 7) % 5);
    recs.push_back({static_cast<std::size_t>(i), "averaged", e, o, {}});
    x.push_back(e);
    y.push_back(o);
  }
  const auto s = summarize(x, y);
  const auto svg = scatter_svg(recs, s, "title <&>", "accuracy");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("title &lt;&amp;&gt;") != std::string::npos);
  std::smatch m;
  REQUIRE(std::regex_search(svg, m, std::regex("data-r-squared=\"([^\"]+)\"")));
  CHECK(m[1].str() == format_double(s.r_squared, kReportDigits));
  char shown[32];
  std::snprintf(shown, sizeof shown, "%.4f", s.r_squared);
  CHECK(svg.find(std::string("R\xC2\xB2 = ") + shown) != std::string::npos);
  std::size_t circles = 0;
  for (std::size_t p = svg.find("<circle"); p != std::string::npos; p = svg.find("<circle", p + 1)) ++circles;
  CHECK(circles == 10);
}
