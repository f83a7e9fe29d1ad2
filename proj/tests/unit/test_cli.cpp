#include <doctest.h>

#include <sstream>

#include <gasket/errors.hpp>
#include <sglab/config.hpp>
#include <sglab/output.hpp>
#include <sglab/run.hpp>
#include <sglab/schema.hpp>

using namespace sglab;
using nlohmann::json;

TEST_CASE("schema validator subset")
{
    const auto schema = json::parse(R"({
        "type": "object",
        "required": ["a"],
        "additionalProperties": false,
        "properties": {
            "a": {"type": "integer", "minimum": 1, "maximum": 5},
            "b": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1, "maxItems": 2},
            "c": {"enum": ["x", "y"]}
        }
    })");
    CHECK(validate(schema, json::parse(R"({"a": 3, "b": [0.5], "c": "x"})")).empty());
    CHECK(validate(schema, json::parse(R"({})")).size() == 1);
    CHECK(validate(schema, json::parse(R"({"a": 0})")).size() == 1);
    CHECK(validate(schema, json::parse(R"({"a": 2.5})")).size() == 1);
    CHECK(validate(schema, json::parse(R"({"a": 1, "d": 1})")).size() == 1);
    CHECK(validate(schema, json::parse(R"({"a": 1, "c": "z"})")).size() == 1);
    const auto bad_item = validate(schema, json::parse(R"({"a": 1, "b": [1, 0]})"));
    REQUIRE(bad_item.size() == 1);
    CHECK(bad_item.front().find("/b/1") != std::string::npos);
    CHECK_FALSE(validate(schema, json::parse(R"({"a": 1, "b": [1, 2, 3]})")).empty());
    CHECK_FALSE(validate(schema, json::parse("[]")).empty());
}

TEST_CASE("run configuration")
{
    CHECK(json::parse(run_config_schema()).contains("properties"));
    const auto c = config_from_json(R"({"command": "walk", "level": 4, "paths": 10, "stat": "exit", "killed": true})");
    CHECK(c.command == "walk");
    CHECK(c.level == 4);
    CHECK(c.paths == 10);
    CHECK(c.killed);
    CHECK(c.seed == 1);

    const auto back = config_from_json(config_to_json(c));
    CHECK(config_hash(back) == config_hash(c));
    auto other = c;
    other.workers = 7;
    other.out = "somewhere.csv";
    CHECK(config_hash(other) == config_hash(c));
    other.seed = 2;
    CHECK(config_hash(other) != config_hash(c));

    CHECK_THROWS_AS(config_from_json("{}"), gasket::UsageError);
    CHECK_THROWS_AS(config_from_json(R"({"command": "walk", "level": 99})"), gasket::UsageError);
    CHECK_THROWS_AS(config_from_json(R"({"command": "dance"})"), gasket::UsageError);
    CHECK_THROWS_AS(config_from_json("not json"), gasket::UsageError);
    try {
        config_from_json(R"({"command": "walk", "workers": 0})");
        FAIL("expected a usage error");
    } catch (const gasket::UsageError& e) {
        CHECK(std::string(e.what()).find("workers") != std::string::npos);
    }
}

TEST_CASE("number formatting round-trips")
{
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345678.9}) {
        CHECK(std::stod(format_double(v)) == v);
    }
    Table t;
    t.columns = {"a", "b", "c"};
    t.add({std::string("x"), std::int64_t{3}, 0.5});
    std::ostringstream csv;
    write_csv(t, csv);
    CHECK(csv.str() == "a,b,c\nx,3,0.5\n");
    std::ostringstream js;
    write_json(t, js);
    const auto parsed = json::parse(js.str());
    CHECK(parsed[0]["b"] == 3);
    CHECK(parsed[0]["a"] == "x");
}

TEST_CASE("measure command output")
{
    RunConfig c;
    c.command = "measure";
    c.kind = "nu";
    c.level = 2;
    const auto out = execute(c);
    std::istringstream lines(out.primary);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "word,mass_num,mass_den,mass");
    std::getline(lines, line);
    CHECK(line.rfind("11,41,225,", 0) == 0);
    std::size_t rows = 1;
    while (std::getline(lines, line)) {
        ++rows;
    }
    CHECK(rows == 9);
    CHECK(out.diagnostics["total"] == "1/1");
}

TEST_CASE("primary output does not depend on the worker count")
{
    RunConfig c;
    c.command = "walk";
    c.level = 3;
    c.paths = 40;
    c.horizon = 0.05;
    c.seed = 9;
    const auto a = execute(c).primary;
    c.workers = 4;
    CHECK(execute(c).primary == a);

    RunConfig b;
    b.command = "bsde";
    b.level = 2;
    b.horizon = 0.1;
    b.problem = std::string(GASKET_EXAMPLES_DIR) + "/linear.json";
    const auto x = execute(b).primary;
    b.workers = 3;
    CHECK(execute(b).primary == x);
}

TEST_CASE("exit statuses")
{
    std::ostringstream out;
    std::ostringstream log;
    RunConfig c;
    c.command = "graph";
    c.level = 13;
    CHECK(run(c, out, log) == 3);
    c.command = "bsde";
    c.level = 2;
    c.problem = "/nonexistent.json";
    CHECK(run(c, out, log) == 2);
    c.command = "graph";
    c.level = 1;
    std::ostringstream ok;
    CHECK(run(c, ok, log) == 0);
    CHECK(ok.str().rfind("id,x_num", 0) == 0);
    CHECK_FALSE(version_string().empty());
}
