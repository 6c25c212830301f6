#include <doctest.h>

#include <cmath>
#include <limits>

#include <crossfit/json_fmt.hpp>

using crossfit::dump_json_17;
using nlohmann::json;

TEST_CASE("17-digit serialization round-trips doubles exactly") {
  const json doc = {{"pi", 3.141592653589793},
                    {"tiny", 1e-300},
                    {"third", 1.0 / 3.0},
                    {"scale", 1.1547005383792515},
                    {"neg", -0.1}};
  const json back = json::parse(dump_json_17(doc));
  for (auto it = doc.begin(); it != doc.end(); ++it)
    CHECK(back.at(it.key()).get<double>() == it.value().get<double>());
}

TEST_CASE("integers stay integers and floats stay floats") {
  const json doc = {{"count", 42}, {"value", 2.0}};
  const std::string text = dump_json_17(doc);
  CHECK(text.find("\"count\":42") != std::string::npos);
  CHECK(text.find("\"value\":2.0") != std::string::npos);
}

TEST_CASE("non-finite numbers serialize as null") {
  const json doc = {{"gap", std::numeric_limits<double>::infinity()}};
  CHECK(dump_json_17(doc) == R"({"gap":null})");
}

TEST_CASE("indented output parses back to the same document") {
  const json doc = {{"list", {1.5, 2.5, json::array()}},
                    {"nested", {{"a", json::object()}, {"b", "text \"quoted\""}}}};
  CHECK(json::parse(dump_json_17(doc, 2)) == doc);
}
