#include "chnsd/quadrature.hpp"

#include <cmath>

namespace chnsd {

namespace {

void push_sym3(QuadRule& r, double w, double a) {
    // orbit of (a, a, 1-2a)
    const double c = 1.0 - 2.0 * a;
    r.points.push_back({c, a, a});
    r.points.push_back({a, c, a});
    r.points.push_back({a, a, c});
    for (int i = 0; i < 3; ++i) r.weights.push_back(w);
}

void push_sym6(QuadRule& r, double w, double a, double b) {
    const double c = 1.0 - a - b;
    r.points.push_back({a, b, c});
    r.points.push_back({a, c, b});
    r.points.push_back({b, a, c});
    r.points.push_back({b, c, a});
    r.points.push_back({c, a, b});
    r.points.push_back({c, b, a});
    for (int i = 0; i < 6; ++i) r.weights.push_back(w);
}

QuadRule make_degree5() {
    QuadRule r;
    r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    r.weights.push_back(0.225 * 0.5);
    push_sym3(r, 0.132394152788506 * 0.5, 0.470142064105115);
    push_sym3(r, 0.125939180544827 * 0.5, 0.101286507323456);

    const double s = std::sqrt(3.0 / 5.0);
    r.edge_points = {0.5 * (1.0 - s), 0.5, 0.5 * (1.0 + s)};
    r.edge_weights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    return r;
}

QuadRule make_degree8() {
    QuadRule r;
    r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    r.weights.push_back(0.144315607677787 * 0.5);
    push_sym3(r, 0.095091634413463 * 0.5, 0.459292588292723);
    push_sym3(r, 0.103217370534718 * 0.5, 0.170569307751760);
    push_sym3(r, 0.032458497623198 * 0.5, 0.050547228317031);
    push_sym6(r, 0.027230314174435 * 0.5, 0.263112829634638, 0.728492392955404);

    // 5-point Gauss-Legendre mapped to [0, 1]
    const double p1 = 0.9061798459386640, p2 = 0.5384693101056831;
    const double w0 = 0.5688888888888889, w1 = 0.4786286704993665, w2 = 0.2369268850561891;
    r.edge_points = {0.5 * (1 - p1), 0.5 * (1 - p2), 0.5, 0.5 * (1 + p2), 0.5 * (1 + p1)};
    r.edge_weights = {0.5 * w2, 0.5 * w1, 0.5 * w0, 0.5 * w1, 0.5 * w2};
    return r;
}

} // namespace

const QuadRule& assembly_rule() {
    static const QuadRule r = make_degree5();
    return r;
}

const QuadRule& norm_rule() {
    static const QuadRule r = make_degree8();
    return r;
}

} // namespace chnsd
