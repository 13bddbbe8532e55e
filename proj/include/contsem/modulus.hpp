#pragma once

#include "contsem/quantale.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace contsem {

/// One affine piece r -> intercept + slope * (r - breakpoint), governing the
/// half-open interval from its breakpoint to the next one. An infinite
/// intercept (extended mode only) makes the piece constantly infinite.
struct Piece {
    Rational breakpoint;
    TruthValue intercept;
    Rational slope;

    friend bool operator==(const Piece&, const Piece&) = default;
};

/// A modulus of uniform continuity: a monotone, right-continuous,
/// piecewise-affine self-map of the carrier fixing 0.
///
/// Pieces are kept canonical: truncated at the carrier top, with adjacent
/// collinear pieces merged, so two moduli are equal as functions iff their
/// piece sequences are equal.
class Modulus {
public:
    /// The identity modulus.
    Modulus() : Modulus(identity()) {}

    static Modulus identity(Quantale q = Quantale{});
    static Modulus zero(Quantale q = Quantale{});
    /// r -> min(K r, top).
    static Modulus lipschitz(const Rational& k, Quantale q = Quantale{});
    /// Right-continuous step function: 0 on [0, r_1), v_i on [r_i, r_{i+1}).
    /// Jumps must have strictly increasing positive positions and
    /// nondecreasing values.
    static Modulus step(std::vector<std::pair<Rational, TruthValue>> jumps,
                        Quantale q = Quantale{});
    /// Validates and canonicalizes arbitrary piece data; values above the
    /// carrier top are truncated. Throws PreconditionError when the data is
    /// not a modulus.
    static Modulus from_pieces(std::vector<Piece> pieces, Quantale q = Quantale{});

    const Quantale& quantale() const noexcept { return quantale_; }
    std::span<const Piece> pieces() const noexcept { return pieces_; }

    TruthValue operator()(const TruthValue& r) const;

    friend bool operator==(const Modulus&, const Modulus&) = default;

private:
    Modulus(Quantale q, std::vector<Piece> pieces) : quantale_(q), pieces_(std::move(pieces)) {}

    Quantale quantale_;
    std::vector<Piece> pieces_;
};

inline TruthValue modulus_apply(const Modulus& m, const TruthValue& r) { return m(r); }

/// outer after inner.
Modulus compose(const Modulus& outer, const Modulus& inner);

enum class Combine { Max, Add };

/// Pointwise maximum, or pointwise tensor.
Modulus combine(Combine op, const Modulus& a, const Modulus& b);

/// a(r) <= b(r) for every r in the carrier.
bool leq(const Modulus& a, const Modulus& b);

/// Admissible families of moduli: only the identity, the Lipschitz moduli
/// r -> min(K r, top) with K >= 1, or every piecewise-affine modulus.
enum class Moduloid { E1, EL, EuPL };

Moduloid parse_moduloid(std::string_view text);
std::string to_string(Moduloid e);

bool contains(Moduloid e, const Modulus& m);

/// Whether the moduloid is closed under pointwise tensor. E1 is not
/// (id + id is the doubling modulus); EL and EuPL are.
bool tensor_closed(Moduloid e) noexcept;

/// The least member of the moduloid that is pointwise >= m. Throws when no
/// member dominates m (E1 with m not below id, or EL with an infinite tail).
Modulus least_member_above(Moduloid e, const Modulus& m);

/// Short text forms: "id", "zero", "lip:K", or "step:r1=v1,r2=v2,...".
Modulus parse_modulus_spec(std::string_view text, Quantale q = Quantale{});

std::string to_string(const Modulus& m);

} // namespace contsem
