#pragma once

// Single-deme two-locus gamete dynamics under multiplicative underdominant
// selection with recombination.

namespace clines {

/// Selection, recombination and dispersal constants.
/// Genotype fitnesses per locus: AA = 1+2sA, Aa = 1+sA-SA, aa = 1 (same for B).
struct FitnessParams {
    double sA = 0.0;
    double sB = 0.0;
    double SA = 0.1;
    double SB = 0.1;
    double r = 0.1;
    double sigma2 = 2.0;

    /// Throws InvalidParameter unless 0 <= sA < SA, 0 <= sB < SB, 0 <= r <= 1/2, sigma2 > 0.
    void validate() const;

    /// Copy with sA, sB, SA, SB and r multiplied by `alpha` (weak-selection scaling).
    FitnessParams scaled(double alpha) const;
};

/// Frequencies of gametes AB, Ab, aB, ab.
struct GameteFreqs {
    double u = 0.0;
    double v = 0.0;
    double w = 0.0;
    double z = 0.0;

    double sum() const { return u + v + w + z; }
    bool valid(double tol = 1e-12) const;
};

/// Allele frequencies of A and B and the linkage disequilibrium D = uz - vw.
struct PQD {
    double p = 0.0;
    double q = 0.0;
    double D = 0.0;
};

/// Mean fitness W̄ of the diploid population formed by random union of gametes.
double mean_fitness(const GameteFreqs& g, const FitnessParams& fp);

/// Unnormalized next-generation gamete numerators; their sum equals mean_fitness(g, fp).
GameteFreqs gamete_numerators(const GameteFreqs& g, const FitnessParams& fp);

/// One discrete generation of selection, recombination and random union.
/// The result is renormalized by its exact component sum.
GameteFreqs recursion_step_exact(const GameteFreqs& g, const FitnessParams& fp);

/// First-order-in-alpha recursion for (p, q, D) with all coefficients scaled by alpha.
PQD recursion_step_first_order(const PQD& s, const FitnessParams& fp, double alpha);

PQD to_pqd(const GameteFreqs& g);

/// Throws InfeasibleState if any reconstructed gamete lies outside [-1e-12, 1+1e-12];
/// values inside that band are clamped to [0, 1].
GameteFreqs from_pqd(const PQD& s);

/// Per-generation net change exact_step(y) - y. Components sum to zero.
GameteFreqs gamete_reaction(const GameteFreqs& g, const FitnessParams& fp);

}  // namespace clines
