#include "compos/error.hpp"
#include "compos/io.hpp"
#include "compos/ternary.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace compos;
using namespace compos::testing;

namespace {

CompositionalDataset parse(const std::string& text, const RunConfig& cfg) {
    std::istringstream in(text);
    return parse_csv(in, cfg);
}

std::size_t error_line(const std::string& text, const RunConfig& cfg) {
    try {
        parse(text, cfg);
    } catch (const DataError& e) {
        return e.line();
    }
    return 0;
}

} // namespace

TEST_CASE("CSV ingestion") {
    RunConfig cfg;
    cfg.covariates = {{"depth", Transform::log}};
    const auto d = parse("sand,silt,clay,depth\n70,20,10,1\n\n10,0,30,2.718281828459045\n", cfg);
    CHECK(d.size() == 2);
    CHECK(d.part_names() == std::vector<std::string>{"sand", "silt", "clay"});
    CHECK(d.covariate_names()[0] == "log(depth)");
    CHECK(d[0].composition[0] == doctest::Approx(0.7));
    CHECK(d[1].composition[1] == 0.0);
    CHECK(d[1].composition[2] == doctest::Approx(0.75));
    CHECK(d[1].covariates[0] == doctest::Approx(1.0));

    RunConfig plain;
    plain.parts = {"b", "a"};
    const auto q = parse("\"a\",b,c\n1,3,100\n", plain);
    CHECK(q.num_parts() == 2);
    CHECK(q[0].composition[0] == doctest::Approx(0.75));

    CHECK(error_line("a,b,c\n1,2,3\n10,-1,30\n", RunConfig{}) == 3);
    CHECK(error_line("a,b,c\n0,0,0\n", RunConfig{}) == 2);
    CHECK(error_line("a,b,c\n1,x,3\n", RunConfig{}) == 2);
    CHECK(error_line("a,b,depth\n1,2,3\n1,2,0\n", cfg) == 3);
    CHECK_THROWS_AS(parse("", RunConfig{}), DataError);

    RunConfig missing;
    missing.parts = {"a", "zzz"};
    try {
        parse("a,b\n1,2\n", missing);
        FAIL("expected config error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::config);
        CHECK(std::string(e.what()).find("zzz") != std::string::npos);
    }
}

TEST_CASE("constraint specs") {
    const std::vector<std::string> names{"sand", "silt", "clay"};
    CHECK(resolve_constraint("sum", names).kind == IdentificationConstraint::Kind::sum_to_zero);
    CHECK(resolve_constraint("ref:silt", names).reference == 1);
    CHECK(resolve_constraint("ref:3", names).reference == 2);
    CHECK_THROWS_AS(resolve_constraint("ref:mud", names), Error);
    CHECK_THROWS_AS(resolve_constraint("other", names), Error);
}

TEST_CASE("number formatting round-trips") {
    Rng rng(2);
    for (int i = 0; i < 1000; ++i) {
        const double v = std::ldexp(uniform(rng, -1.0, 1.0), static_cast<int>(uniform_int(rng, -60, 60)));
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("dataset CSV round trip") {
    const auto data = simulate_dataset(lognormal_scenario(20, 3, 2, 4)).data;
    std::ostringstream out;
    write_dataset_csv(out, data);
    std::istringstream in(out.str());
    RunConfig cfg;
    cfg.covariates = {{"x1"}, {"x2"}};
    const auto back = parse_csv(in, cfg);
    CHECK((back.raw_matrix().array() == data.raw_matrix().array()).all());
    CHECK((back.design_matrix().array() == data.design_matrix().array()).all());
}

TEST_CASE("scenario files") {
    std::istringstream ok("N = 10\nD = 2\np = 0\ntrue_B = 0.5; -0.5\nsigma_diag = 0.1, 0.2  # comment\n");
    const auto sc = parse_scenario(ok);
    CHECK(sc.N == 10);
    CHECK(std::get<LognormalLaw>(sc.errors).sigma(1, 1) == doctest::Approx(0.2));

    auto key_of = [](const std::string& text) {
        std::istringstream in(text);
        try {
            parse_scenario(in);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::config);
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(key_of("N = 10\nD = 2\np = 0\ntrue_B = 0.5; -0.5\nsigma_diag = 0.1, 0.2\nbogus = 1\n").find("bogus") !=
          std::string::npos);
    CHECK(key_of("N = ten\nD = 2\np = 0\ntrue_B = 0.5; -0.5\nsigma_diag = 0.1, 0.2\n").find("'N'") !=
          std::string::npos);
    CHECK(key_of("N = 10\nD = 2\np = 0\ntrue_B = 0.5, 1; -0.5\nsigma_diag = 0.1, 0.2\n").find("true_B") !=
          std::string::npos);
}

TEST_CASE("ternary coordinates") {
    auto at = [](double a, double b, double c) {
        Vector v(3);
        v << a, b, c;
        return ternary_coords(Composition::from_parts(v));
    };
    CHECK(at(1, 0, 0).x == 0.0);
    CHECK(at(0, 1, 0).x == 1.0);
    CHECK(at(0, 0, 1).x == 0.5);
    CHECK(at(0, 0, 1).y == doctest::Approx(std::sqrt(3.0) / 2));
    const auto bc = at(1.0 / 3, 1.0 / 3, 1.0 / 3);
    CHECK(bc.x == doctest::Approx(0.5));
    CHECK(bc.y == doctest::Approx(std::sqrt(3.0) / 6));
    CHECK_THROWS_AS(ternary_coords(Composition::normalize(Vector::Ones(4))), Error);
}

TEST_CASE("ternary SVG") {
    TernaryPlot plot;
    for (int i = 0; i < 3; ++i) {
        Vector v(3);
        v << 1.0 + i, 2.0, 3.0;
        plot.points.push_back(Composition::normalize(v));
        plot.point_covariate.push_back(i);
    }
    plot.part_names = {"a", "b", "c"};
    const std::string svg = render_ternary_svg(plot);
    std::size_t count = 0;
    for (auto pos = svg.find("class=\"point\""); pos != std::string::npos; pos = svg.find("class=\"point\"", pos + 1)) {
        ++count;
    }
    CHECK(count == 3);
    CHECK(svg.find("#0000ff") != std::string::npos);
    CHECK(svg.find("#ff0000") != std::string::npos);
    CHECK(svg.find("ql-curve") == std::string::npos);
    CHECK(render_ternary_svg(plot) == svg);
}
