#include "clines/genetics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "clines/errors.hpp"

namespace clines {

namespace {

constexpr double kFeasibilityBand = 1e-12;

// Genotype fitness factors for one locus.
struct LocusFitness {
    double hom;  // 1 + 2s
    double het;  // 1 + s - S
};

LocusFitness locus(double s, double S) { return {1.0 + 2.0 * s, 1.0 + s - S}; }

}  // namespace

void FitnessParams::validate() const {
    if (!(sA >= 0.0 && sA < SA)) throw InvalidParameter("require 0 <= sA < SA");
    if (!(sB >= 0.0 && sB < SB)) throw InvalidParameter("require 0 <= sB < SB");
    if (!(r >= 0.0 && r <= 0.5)) throw InvalidParameter("require 0 <= r <= 1/2");
    if (!(sigma2 > 0.0)) throw InvalidParameter("require sigma2 > 0");
}

FitnessParams FitnessParams::scaled(double alpha) const {
    FitnessParams out = *this;
    out.sA *= alpha;
    out.sB *= alpha;
    out.SA *= alpha;
    out.SB *= alpha;
    out.r *= alpha;
    return out;
}

bool GameteFreqs::valid(double tol) const {
    for (double c : {u, v, w, z}) {
        if (!(c >= -tol && c <= 1.0 + tol)) return false;
    }
    return std::abs(sum() - 1.0) <= tol;
}

double mean_fitness(const GameteFreqs& g, const FitnessParams& fp) {
    const auto [a2, a1] = locus(fp.sA, fp.SA);
    const auto [b2, b1] = locus(fp.sB, fp.SB);
    const double u = g.u, v = g.v, w = g.w, z = g.z;
    return a2 * b2 * u * u + a2 * v * v + b2 * w * w + z * z
         + 2.0 * a2 * b1 * u * v + 2.0 * a1 * b2 * u * w
         + 2.0 * a1 * b1 * u * z + 2.0 * a1 * b1 * v * w
         + 2.0 * a1 * v * z + 2.0 * b1 * w * z;
}

GameteFreqs gamete_numerators(const GameteFreqs& g, const FitnessParams& fp) {
    const auto [a2, a1] = locus(fp.sA, fp.SA);
    const auto [b2, b1] = locus(fp.sB, fp.SB);
    const double r = fp.r;
    const double u = g.u, v = g.v, w = g.w, z = g.z;
    const double dh = a1 * b1;  // double heterozygote AB|ab or Ab|aB

    GameteFreqs n;
    n.u = a2 * b2 * u * u + a2 * b1 * u * v + a1 * b2 * u * w
        + (1.0 - r) * dh * u * z + r * dh * w * v;
    n.v = a2 * v * v + a2 * b1 * v * u + a1 * v * z
        + (1.0 - r) * dh * v * w + r * dh * u * z;
    n.w = b2 * w * w + b1 * w * z + a1 * b2 * w * u
        + (1.0 - r) * dh * w * v + r * dh * u * z;
    n.z = z * z + a1 * z * v + b1 * z * w
        + (1.0 - r) * dh * z * u + r * dh * w * v;
    return n;
}

GameteFreqs recursion_step_exact(const GameteFreqs& g, const FitnessParams& fp) {
    const GameteFreqs n = gamete_numerators(g, fp);
    const double wbar = mean_fitness(g, fp);
    GameteFreqs out{n.u / wbar, n.v / wbar, n.w / wbar, n.z / wbar};
    const double total = out.sum();
    out.u /= total;
    out.v /= total;
    out.w /= total;
    out.z /= total;
    return out;
}

PQD recursion_step_first_order(const PQD& s, const FitnessParams& fp, double alpha) {
    const double selA = fp.SA * (2.0 * s.p - 1.0) + fp.sA;
    const double selB = fp.SB * (2.0 * s.q - 1.0) + fp.sB;
    PQD out;
    out.p = s.p + alpha * (selA * s.p * (1.0 - s.p) + selB * s.D);
    out.q = s.q + alpha * (selB * s.q * (1.0 - s.q) + selA * s.D);
    out.D = s.D - alpha * (fp.r + (2.0 * s.p - 1.0) * selA + (2.0 * s.q - 1.0) * selB) * s.D;
    return out;
}

PQD to_pqd(const GameteFreqs& g) {
    return {g.u + g.v, g.u + g.w, g.u * g.z - g.v * g.w};
}

GameteFreqs from_pqd(const PQD& s) {
    GameteFreqs g{s.p * s.q + s.D,
                  s.p * (1.0 - s.q) - s.D,
                  (1.0 - s.p) * s.q - s.D,
                  (1.0 - s.p) * (1.0 - s.q) + s.D};
    for (double* c : {&g.u, &g.v, &g.w, &g.z}) {
        if (*c < -kFeasibilityBand || *c > 1.0 + kFeasibilityBand) {
            throw InfeasibleState("(p,q,D) = (" + std::to_string(s.p) + ", " + std::to_string(s.q) +
                                  ", " + std::to_string(s.D) + ") is outside the gamete simplex");
        }
        *c = std::clamp(*c, 0.0, 1.0);
    }
    return g;
}

GameteFreqs gamete_reaction(const GameteFreqs& g, const FitnessParams& fp) {
    const GameteFreqs next = recursion_step_exact(g, fp);
    return {next.u - g.u, next.v - g.v, next.w - g.w, next.z - g.z};
}

}  // namespace clines
