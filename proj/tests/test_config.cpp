#include <catch2/catch_amalgamated.hpp>

#include "qlsep/config.hpp"

using namespace qlsep;

TEST_CASE("minimal config gets defaults", "[config]") {
    const json j = parse_json_strict(R"({"experiment":"separation","n":[2,4],"seed":7})");
    const ExperimentConfig c = config_from_json(j);
    validate_config(c);
    REQUIRE(c.seed == 7);
    REQUIRE(c.n_list == std::vector<int>{2, 4});
    REQUIRE(c.ell == 0);
    REQUIRE(c.ell_for(2) == 40);   // 10 n^2
    REQUIRE(c.ell_for(4) == 160);
    REQUIRE(c.budget_for(4) == 3 * 4 * 160);
    REQUIRE(c.f_trials == 50);
    REQUIRE(c.protocol_trials == 5);
    REQUIRE(c.criteria.epsilon == 0.95);
    REQUIRE(c.label_mode == LabelMode::FullX);
    REQUIRE(c.exact);
}

TEST_CASE("config validation failures", "[config]") {
    SECTION("epsilon out of range") {
        const json j = parse_json_strict(
            R"({"experiment":"separation","n":[2],"criteria":{"epsilon":1.2}})");
        REQUIRE_THROWS_AS(validate_config(config_from_json(j)), ConfigError);
    }
    SECTION("duplicate keys are rejected") {
        REQUIRE_THROWS_AS(parse_json_strict(R"({"seed":1,"seed":2})"), ConfigError);
        REQUIRE_THROWS_AS(
            parse_json_strict(R"({"criteria":{"epsilon":0.5,"epsilon":0.6}})"), ConfigError);
    }
    SECTION("malformed JSON carries a location") {
        try {
            parse_json_strict("{\"seed\": }");
            FAIL("expected ConfigError");
        } catch (const ConfigError &e) {
            REQUIRE(std::string(e.what()).find("config:") != std::string::npos);
        }
    }
    SECTION("unknown keys are rejected with the key name") {
        const json j = parse_json_strict(R"({"experiment":"separation","n":[2],"sede":3})");
        try {
            config_from_json(j);
            FAIL("expected ConfigError");
        } catch (const ConfigError &e) {
            REQUIRE(std::string(e.what()).find("sede") != std::string::npos);
        }
    }
    SECTION("leaky strategy without the override") {
        const json j = parse_json_strict(
            R"({"experiment":"separation","n":[2],"strategies":["leaky-full-table"]})");
        REQUIRE_THROWS_AS(validate_config(config_from_json(j)), ConfigError);
        const json ok = parse_json_strict(
            R"({"experiment":"separation","n":[2],"strategies":["leaky-full-table"],"allow_leaky":true})");
        REQUIRE_NOTHROW(validate_config(config_from_json(ok)));
    }
    SECTION("TV-based experiments cap n at 12, membership-based at 14") {
        const json j = parse_json_strict(R"({"experiment":"separation","n":[13]})");
        REQUIRE_THROWS_AS(validate_config(config_from_json(j)), ConfigError);
        const json hm13 = parse_json_strict(R"({"experiment":"hm","n":[13]})");
        REQUIRE_NOTHROW(validate_config(config_from_json(hm13)));
        const json hm15 = parse_json_strict(R"({"experiment":"hm","n":[15]})");
        REQUIRE_THROWS_AS(validate_config(config_from_json(hm15)), ConfigError);
    }
    SECTION("unknown strategy and unknown experiment") {
        REQUIRE_THROWS_AS(validate_config(config_from_json(parse_json_strict(
                              R"({"experiment":"separation","n":[2],"strategies":["foo"]})"))),
                          ConfigError);
        REQUIRE_THROWS_AS(validate_config(config_from_json(
                              parse_json_strict(R"({"experiment":"fly","n":[2]})"))),
                          ConfigError);
    }
    SECTION("a too-tight budget rejects honest strategies") {
        const json j = parse_json_strict(
            R"({"experiment":"separation","n":[4],"m_budget":10})");
        REQUIRE_THROWS_AS(validate_config(config_from_json(j)), ConfigError);
    }
    SECTION("exhaustive x needs n <= 12") {
        const json j = parse_json_strict(
            R"({"experiment":"separation","n":[13],"x_mode":"exhaustive","exact":false})");
        REQUIRE_THROWS_AS(validate_config(config_from_json(j)), ConfigError);
    }
}

TEST_CASE("flag overrides win over file values and merge deeply", "[config]") {
    const std::string path = "test_config_tmp.json";
    write_file(path, R"({"experiment":"separation","n":[2,4],"seed":3,
                         "criteria":{"epsilon":0.5,"delta":0.5}})");
    json overrides = json::object();
    overrides["seed"] = 11;
    overrides["criteria"] = json{{"delta", 0.25}};
    const ExperimentConfig c = load_config(path, overrides);
    REQUIRE(c.seed == 11);
    REQUIRE(c.criteria.epsilon == 0.5);   // kept from the file
    REQUIRE(c.criteria.delta == 0.25);    // overridden
    REQUIRE(c.n_list == std::vector<int>{2, 4});
    std::remove(path.c_str());
}

TEST_CASE("config echo is stable", "[config]") {
    const json j = parse_json_strict(R"({"experiment":"hm","n":[3],"seed":5})");
    const ExperimentConfig c = config_from_json(j);
    const json echo = config_to_json(c);
    REQUIRE(echo.at("experiment") == "hm");
    REQUIRE(echo.at("seed") == 5);
    // Round-tripping the echo reproduces the same config.
    const ExperimentConfig c2 = config_from_json(echo);
    REQUIRE(config_to_json(c2) == echo);
}
