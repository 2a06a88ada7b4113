#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cellflow/hydraulics.hpp"
#include "cellflow/synthetic.hpp"
#include "fixtures.hpp"

using namespace cellflow;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double phi(double c, double alpha, double f) {
    return c * std::pow(std::abs(f), alpha - 1.0) * f;
}

/// Independent triangle oracle: with edges ab, bc, ca and junction demands
/// delta at b and c, mass balance leaves one unknown x = f_ab with
/// f_bc = x - delta, f_ca = x - 2 delta, and the loop equation
/// phi_ab(x) + phi_bc(x - delta) + phi_ca(x - 2 delta) = 0 is monotone in x.
double triangle_flow_oracle(const Eigen::Vector3d& c, double alpha, double delta) {
    auto loop = [&](double x) {
        return phi(c[0], alpha, x) + phi(c[1], alpha, x - delta) +
               phi(c[2], alpha, x - 2.0 * delta);
    };
    double lo = -1.0, hi = 3.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (loop(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("head_loss basics", "[hydraulics]") {
    HeadLossModel m2 = HeadLossModel::direct(
        HeadLossLaw::darcy_weisbach, Eigen::VectorXd::Constant(1, 2.0));
    CHECK(head_loss(Eigen::VectorXd::Zero(1), m2)[0] == 0.0);
    CHECK_THAT(head_loss(Eigen::VectorXd::Constant(1, 3.0), m2)[0], WithinAbs(18.0, 1e-13));
    CHECK_THAT(head_loss(Eigen::VectorXd::Constant(1, -3.0), m2)[0], WithinAbs(-18.0, 1e-13));

    HeadLossModel mhw = HeadLossModel::direct(
        HeadLossLaw::hazen_williams, Eigen::VectorXd::Constant(1, 1.0));
    CHECK(mhw.alpha == 1.852);
    const double expect = std::pow(2.0, 1.852);  // scalar oracle
    CHECK_THAT(head_loss(Eigen::VectorXd::Constant(1, 2.0), mhw)[0],
               WithinRel(expect, 1e-13));
}

TEST_CASE("head_loss is odd and monotone", "[hydraulics]") {
    detail::Rng rng(5);
    for (HeadLossLaw law : {HeadLossLaw::darcy_weisbach, HeadLossLaw::hazen_williams}) {
        HeadLossModel m = HeadLossModel::direct(law, Eigen::VectorXd::Constant(1, 37.0));
        double prev = -1e18;
        for (double f : {-2.0, -0.5, -1e-4, 0.0, 1e-4, 0.5, 2.0}) {
            Eigen::VectorXd v = Eigen::VectorXd::Constant(1, f);
            double y = head_loss(v, m)[0];
            CHECK_THAT(head_loss(-v, m)[0], WithinAbs(-y, 1e-12 * std::max(1.0, std::abs(y))));
            CHECK(y > prev);
            prev = y;
        }
        (void)rng;
    }
}

TEST_CASE("head_loss derivative matches central differences", "[hydraulics]") {
    detail::Rng rng(31);
    for (HeadLossLaw law : {HeadLossLaw::darcy_weisbach, HeadLossLaw::hazen_williams}) {
        Eigen::VectorXd c(1);
        for (int k = 0; k < 20; ++k) {
            c[0] = rng.uniform(1.0, 500.0);
            HeadLossModel m = HeadLossModel::direct(law, c);
            double f = rng.uniform(1e-3, 2.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
            double h = 1e-6 * std::max(1.0, std::abs(f));
            Eigen::VectorXd fp = Eigen::VectorXd::Constant(1, f + h);
            Eigen::VectorXd fm = Eigen::VectorXd::Constant(1, f - h);
            double fd = (head_loss(fp, m)[0] - head_loss(fm, m)[0]) / (2.0 * h);
            double an = head_loss_derivative(Eigen::VectorXd::Constant(1, f), m)[0];
            CHECK_THAT(an, WithinRel(fd, 1e-6));
        }
    }
}

TEST_CASE("single pipe analytic case", "[hydraulics]") {
    Network net;
    net.name = "single-pipe";
    Node r{"r", NodeKind::reservoir, 10.0, 0.0, 10.0};
    Node j{"j", NodeKind::junction, 0.0, 0.01, {}};
    net.nodes = {r, j};
    net.edges = {{"p", EdgeKind::pipe, 0, 1, 1.0, 1.0, 1.0}};
    validate(net);

    HeadLossModel model = HeadLossModel::direct(
        HeadLossLaw::darcy_weisbach, Eigen::VectorXd::Constant(1, 100.0));
    HydraulicState st = solve_steady_state(net, model, 1e-12);
    CHECK_THAT(st.flows[0], WithinAbs(0.01, 1e-10));
    CHECK_THAT(st.heads[1], WithinAbs(10.0 - 100.0 * 0.01 * 0.01, 1e-10));
    CHECK_THAT(st.heads[0], WithinAbs(10.0, 0.0));
    // implied injection is the junction demand, reported as negative
    CHECK_THAT(st.demand[0], WithinAbs(-0.01, 1e-10));
}

TEST_CASE("triangle flows match the scalar loop oracle", "[hydraulics]") {
    const double delta = 0.01;

    SECTION("symmetric resistances give symmetric flows") {
        Network net = fixtures::triangle(delta);
        Eigen::Vector3d c(150.0, 150.0, 150.0);
        HeadLossModel model = HeadLossModel::direct(HeadLossLaw::darcy_weisbach, c);
        HydraulicState st = solve_steady_state(net, model, 1e-12);

        double x = triangle_flow_oracle(c, 2.0, delta);
        CHECK_THAT(st.flows[0], WithinAbs(x, 1e-9));
        // the two boundary pipes carry equal flow toward b and c
        CHECK_THAT(st.flows[0], WithinAbs(-st.flows[2], 1e-10));
        CHECK_THAT(st.flows[1], WithinAbs(0.0, 1e-10));
    }

    SECTION("asymmetric resistances, both laws") {
        Eigen::Vector3d c(100.0, 55.0, 240.0);
        for (HeadLossLaw law : {HeadLossLaw::darcy_weisbach, HeadLossLaw::hazen_williams}) {
            Network net = fixtures::triangle(delta);
            HeadLossModel model = HeadLossModel::direct(law, c);
            HydraulicState st = solve_steady_state(net, model, 1e-12);
            double x = triangle_flow_oracle(c, model.alpha, delta);
            INFO(to_string(law));
            CHECK_THAT(st.flows[0], WithinAbs(x, 1e-9));
            CHECK_THAT(st.flows[1], WithinAbs(x - delta, 1e-9));
            CHECK_THAT(st.flows[2], WithinAbs(x - 2.0 * delta, 1e-9));
        }
    }
}

TEST_CASE("seeded synthetics converge with tight residuals", "[hydraulics]") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Network net = generate_synthetic(seed, 50, 0.4);
        HeadLossModel model = HeadLossModel::from_network(net, HeadLossLaw::hazen_williams);
        HydraulicState st = solve_steady_state(net, model, 1e-9);
        INFO("seed " << seed << " iterations " << st.iterations);
        CHECK(st.residual_mass <= 1e-8);
        CHECK(st.residual_energy <= 1e-8);

        IncidenceMatrix b1 = build_b1(net);
        // mass balance on every row with the implied reservoir injection
        Eigen::VectorXd gap = b1.m.cast<double>() * st.flows - st.demand;
        CHECK(gap.cwiseAbs().maxCoeff() <= 1e-8);
        // total reservoir injection equals total junction demand
        CHECK_THAT(st.demand.sum(), WithinAbs(0.0, 1e-8));

        // Kirchhoff loop law emerges without being imposed
        IncidenceMatrix b2 = build_b2(b1, 30);
        Eigen::VectorXd loop = b2.m.cast<double>().transpose() *
                               head_loss(st.flows, model);
        CHECK(loop.cwiseAbs().maxCoeff() <= 1e-6);

        // heads stay positive on these instances
        CHECK(st.heads.minCoeff() > 0.0);
    }
}

TEST_CASE("solver rejects active elements and missing boundaries", "[hydraulics]") {
    SECTION("pump edge") {
        Network net = fixtures::triangle();
        net.edges.push_back({"pump1", EdgeKind::pump, 0, 2, 0, 0, 0});
        validate(net);
        HeadLossModel model =
            HeadLossModel::direct(HeadLossLaw::darcy_weisbach, Eigen::VectorXd::Ones(4));
        REQUIRE_THROWS_MATCHES(solve_steady_state(net, model), StructuralError,
                               Catch::Matchers::MessageMatches(
                                   Catch::Matchers::ContainsSubstring("pump1")));
    }
    SECTION("no fixed-head node") {
        Network net = fixtures::triangle();
        net.nodes[0].kind = NodeKind::junction;
        net.nodes[0].fixed_head.reset();
        net.nodes[0].demand = 0.0;
        HeadLossModel model =
            HeadLossModel::direct(HeadLossLaw::darcy_weisbach, Eigen::VectorXd::Ones(3));
        REQUIRE_THROWS_AS(solve_steady_state(net, model), StructuralError);
    }
}

TEST_CASE("orient_to_flow flips negative edges", "[hydraulics]") {
    SECTION("toy state") {
        Network net = fixtures::triangle();
        HydraulicState st;
        st.flows = Eigen::Vector3d(-1.0, 2.0, 0.0);
        st.heads = Eigen::Vector3d(10.0, 9.0, 8.0);
        st.demand = Eigen::Vector3d::Zero();
        auto [net2, st2] = orient_to_flow(net, st);
        CHECK(st2.flows[0] == 1.0);
        CHECK(st2.flows[1] == 2.0);
        CHECK(net2.edges[0].tail == net.edges[0].head);
        CHECK(net2.edges[0].head == net.edges[0].tail);
        CHECK(net2.edges[1].tail == net.edges[1].tail);  // untouched
    }
    SECTION("already nonnegative is the identity") {
        Network net = fixtures::triangle();
        HydraulicState st;
        st.flows = Eigen::Vector3d(1.0, 2.0, 0.0);
        st.heads = Eigen::Vector3d::Zero();
        st.demand = Eigen::Vector3d::Zero();
        auto [net2, st2] = orient_to_flow(net, st);
        CHECK(net2 == net);
        CHECK(st2.flows == st.flows);
    }
    SECTION("mass balance is preserved after reorientation") {
        Network net = generate_synthetic(6, 40, 0.5);
        HeadLossModel model = HeadLossModel::from_network(net, HeadLossLaw::hazen_williams);
        HydraulicState st = solve_steady_state(net, model, 1e-11);
        auto [net2, st2] = orient_to_flow(net, st);
        CHECK(st2.flows.minCoeff() >= 0.0);
        IncidenceMatrix b1 = build_b1(net2);
        Eigen::VectorXd gap = b1.m.cast<double>() * st2.flows - st2.demand;
        CHECK(gap.cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("resistances from pipe attributes are positive and increase with length",
          "[hydraulics]") {
    Network net = generate_synthetic(2, 12, 0.3);
    for (HeadLossLaw law : {HeadLossLaw::darcy_weisbach, HeadLossLaw::hazen_williams}) {
        HeadLossModel m = HeadLossModel::from_network(net, law);
        CHECK(m.c.minCoeff() > 0.0);
    }
    Network two = fixtures::triangle();
    two.edges[1].length = 10.0 * two.edges[0].length;
    two.edges[1].diameter = two.edges[0].diameter;
    two.edges[1].roughness = two.edges[0].roughness;
    HeadLossModel m = HeadLossModel::from_network(two, HeadLossLaw::hazen_williams);
    CHECK_THAT(m.c[1], WithinRel(10.0 * m.c[0], 1e-12));
}
