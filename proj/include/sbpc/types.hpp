#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace sbpc {

using Vec = Eigen::VectorXd;

// State and input vectors. Both built-in models use n = 2, m = 1, but nothing
// below assumes those sizes.
using State = Eigen::VectorXd;
using Input = Eigen::VectorXd;

/// Weighted infinity norm max_i w(i)*|x(i)|. Weights must be positive.
double weighted_inf_norm(const Vec& x, const Vec& w);

/// Plain infinity norm.
double inf_norm(const Vec& x);

/// Thrown when a model evaluation produces a non-finite state.
struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when the cruise inner loop is undefined (zero or negative speed).
struct CruiseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown on invalid arguments (out-of-range indices, malformed structures).
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a problem is infeasible in a way the algorithms cannot soften
/// (every candidate violates a hard state constraint).
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One control decision. Continuous actions carry a free input vector,
// discrete actions carry the alphabet slot they came from together with the
// resolved value, and Cruise resolves against the current state during
// rollout (the value is state dependent and not stored here).
struct Action {
    enum class Kind { Continuous, Discrete, Cruise };

    Kind kind = Kind::Continuous;
    Input u;        // Continuous: free value; Discrete: alphabet entry
    int index = -1; // Discrete: 0-based alphabet slot (tie-break order)

    static Action continuous(Input value)
    {
        Action a;
        a.kind = Kind::Continuous;
        a.u = std::move(value);
        return a;
    }
    static Action discrete(int alphabet_index, Input value)
    {
        Action a;
        a.kind = Kind::Discrete;
        a.u = std::move(value);
        a.index = alphabet_index;
        return a;
    }
    static Action cruise(int alphabet_index = -1)
    {
        Action a;
        a.kind = Kind::Cruise;
        a.index = alphabet_index;
        return a;
    }

    bool operator==(const Action& o) const
    {
        if (kind != o.kind || index != o.index) return false;
        if (kind == Kind::Cruise) return true;
        return u.size() == o.u.size() && u == o.u;
    }
};

} // namespace sbpc
