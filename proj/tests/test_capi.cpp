#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "spaceform.h"

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

TEST_CASE("verify through the C surface") {
    char report[4096];
    int ok = -1;
    REQUIRE(sf_verify("pucci", 42, 200, 0, 0, 0, 0, report, sizeof report, &ok) == SF_OK);
    CHECK(ok == 1);
    CHECK(std::string(report).find("[PASS]") != std::string::npos);

    // invalid ellipticity data is a validation error before any trial
    CHECK(sf_verify("lemma21", 42, 10, 1, 2.0, 1.0, 0.0, nullptr, 0, &ok) == SF_ERR_VALIDATION);
    CHECK(std::string(sf_last_error()).size() > 0);
    CHECK(sf_verify("bogus", 1, 10, 0, 0, 0, 0, nullptr, 0, &ok) == SF_ERR_VALIDATION);
}

TEST_CASE("cone handle") {
    sf_cone_result* r = nullptr;
    REQUIRE(sf_cone_solve(M_PI / 2.0, 1.0, 1.0, 1e-7, &r) == SF_OK);
    CHECK(std::abs(sf_cone_beta(r) - 2.0) < 1e-6);
    CHECK(sf_cone_residual(r) < 1e-8);
    const long n = sf_cone_node_count(r);
    REQUIRE(n > 100);
    std::vector<double> theta(static_cast<size_t>(n)), phi(static_cast<size_t>(n));
    sf_cone_profile(r, theta.data(), phi.data());
    CHECK(theta.front() == 0.0);
    CHECK(std::abs(theta.back() - M_PI / 2.0) < 1e-9);
    CHECK(std::abs(phi.back()) < 1e-6);
    sf_cone_free(r);

    CHECK(sf_cone_solve(-1.0, 1.0, 1.0, 1e-7, &r) == SF_ERR_VALIDATION);
}

TEST_CASE("radial handle") {
    sf_radial_result* r = nullptr;
    REQUIRE(sf_radial_solve(SF_CHART_EUCLIDEAN, 2, 1.0, 1.0, 1.0, 0.0, 2.0, 0.0, SF_SIGN_MINUS,
                            1e-10, &r) == SF_OK);
    CHECK(std::abs(sf_radial_c0(r) - 1.0) < 1e-8);
    const long n = sf_radial_node_count(r);
    REQUIRE(n > 100);
    std::vector<double> rr(static_cast<size_t>(n)), u(static_cast<size_t>(n)),
        du(static_cast<size_t>(n));
    sf_radial_profile(r, rr.data(), u.data(), du.data());
    CHECK(std::abs(u.front() - 0.5) < 1e-8);
    sf_radial_free(r);

    // hemisphere restriction surfaces as a validation error
    CHECK(sf_radial_solve(SF_CHART_SPHERE, 2, 1.6, 1.0, 1.0, 0.0, 1.0, 0.0, SF_SIGN_MINUS, 1e-8,
                          &r) == SF_ERR_VALIDATION);
    CHECK(std::string(sf_last_error()).find("hemisphere") != std::string::npos);
}

TEST_CASE("grid, profile, moving plane round trip") {
    sf_grid_domain* dom = nullptr;
    REQUIRE(sf_grid_build_ball(SF_CHART_HYPERBOLIC, 0.0, 1.0, 0.4, 1.0 / 32.0, 2, &dom) == SF_OK);
    CHECK(sf_grid_interior_count(dom) > 100);

    sf_grid_field* u = nullptr;
    int iters = 0;
    double res = 0.0;
    REQUIRE(sf_grid_solve(dom, 1.0, 1.1, 0.0, 1.0, 0.0, SF_SIGN_MINUS, 2, 1e-8, 50, 1e-12, &u,
                          &iters, &res) == SF_OK);
    CHECK(res <= 1e-8);
    CHECK(iters >= 1);

    double mean = 0.0, spread = 0.0;
    long count = 0;
    REQUIRE(sf_boundary_profile(dom, u, nullptr, &mean, &spread, &count) == SF_OK);
    CHECK(count > 50);
    CHECK(mean > 0.0);
    CHECK(spread < 0.05);

    REQUIRE(sf_grid_domain_write_csv(dom, "capi_dom.csv") == SF_OK);
    REQUIRE(sf_grid_field_write_csv(dom, u, "capi_field.csv") == SF_OK);

    sf_grid_domain* dom2 = nullptr;
    REQUIRE(sf_grid_domain_read_csv("capi_dom.csv", &dom2) == SF_OK);
    sf_grid_field* u2 = nullptr;
    REQUIRE(sf_grid_field_read_csv("capi_field.csv", dom2, &u2) == SF_OK);

    sf_mp_report* rep = nullptr;
    REQUIRE(sf_moving_plane(dom2, u2, 2e-3, +1, &rep) == SF_OK);
    CHECK(sf_mp_symmetric(rep) == 1);
    CHECK(std::abs(sf_mp_s_star(rep)) <= 1.0 / 32.0);
    REQUIRE(sf_mp_write_report(rep, "capi_report.txt") == SF_OK);

    if (sf_mp_situation_of(rep) == SF_MP_CORNER) {
        double fit = 0.0;
        int consistent = 0;
        REQUIRE(sf_mp_corner_growth(dom2, u2, rep, 0.5, 2.0, nullptr, &fit, &consistent) == SF_OK);
        CHECK(consistent == 1);
        CHECK(std::isnan(fit)); // symmetric ball: nothing to measure
    }

    sf_mp_free(rep);
    sf_grid_field_free(u2);
    sf_grid_domain_free(dom2);
    sf_grid_field_free(u);
    sf_grid_domain_free(dom);
    std::remove("capi_dom.csv");
    std::remove("capi_field.csv");
    std::remove("capi_report.txt");

    // io errors carry the code
    CHECK(sf_grid_domain_read_csv("missing_file.csv", &dom2) == SF_ERR_IO);
}
