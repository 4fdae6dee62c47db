#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "blochlab/graph_model.hpp"
#include "blochlab/laurent.hpp"

namespace blochlab {

class CertificateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class CertificateKind { Exact, Numeric };
enum class Provenance { Symmetry, Multilayer, Composite, Flatband };

std::string to_string(CertificateKind k);
std::string to_string(Provenance p);

struct Factor {
    NumericPoly numeric;
    std::optional<LaurentPoly> exact;
    int multiplicity = 1;
    bool unit = false;  // monomial normalization (c z^n), not counted as a factor
};

struct ResidualStats {
    std::size_t samples = 0;
    double max_relative = 0.0;
    double mean_relative = 0.0;
    double tolerance = 0.0;
    std::uint64_t seed = 0;
};

// D (or D(z, lambda0)) written as a product of factors. Exact certificates were
// checked term-for-term; numeric ones at fresh random points.
struct FactorizationCertificate {
    CertificateKind kind = CertificateKind::Numeric;
    Provenance provenance = Provenance::Symmetry;
    LaurentPoly target;
    std::vector<Factor> factors;
    ResidualStats residual;

    std::size_t factor_count() const;  // non-unit factors, with multiplicity
    NumericPoly numeric_product() const;
    std::optional<LaurentPoly> exact_product() const;
};

struct CertificateOptions {
    std::uint64_t seed = 1;
    std::size_t samples = 100;
    double tolerance = 1e-8;
    double commute_tol = 1e-10;
};

// Relative residual |target - prod| / sum_terms |c z^n lambda^m| at random
// (z, lambda) with |z_i| in [0.5, 2], |lambda| <= 2.
ResidualStats validate_factors(const LaurentPoly& target, const std::vector<Factor>& factors,
                               const CertificateOptions& opts);

// U is a unitary matrix on C^W commuting with A(zeta).
FactorizationCertificate symmetry_factorize(const OperatorSpec& spec, const Eigen::MatrixXcd& u,
                                            const CertificateOptions& opts = {});
FactorizationCertificate symmetry_factorize(const OperatorSpec& spec, const RationalMatrix& u,
                                            const CertificateOptions& opts = {});

FactorizationCertificate multilayer_factorize(const OperatorSpec& base, const RationalMatrix& coupling,
                                              const CertificateOptions& opts = {});

struct CompositeResult {
    std::optional<FactorizationCertificate> certificate;
    std::vector<GaussianRational> composite_coefficients;  // P(xi) ascending, after normalization
    std::vector<int> monomial_shift;                       // z^shift applied before rewriting
    std::string failure;
    bool success() const { return certificate.has_value(); }
};

// D(z, lambda0) as a polynomial in g, factored over the roots of P.
CompositeResult composite_factorize(const OperatorSpec& spec, const GaussianRational& lambda0, const LaurentPoly& g,
                                    const CertificateOptions& opts = {});

// D = F(lambda) * (D / F) with F the lambda-coefficient gcd; nullopt without flat bands.
std::optional<FactorizationCertificate> flatband_factorize(const OperatorSpec& spec);

}  // namespace blochlab
