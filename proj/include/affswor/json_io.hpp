#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "affswor/numeric.hpp"

namespace affswor {

class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

/// Numeric JSON entries go through their shortest round-trip decimal, so
/// a literal 0.415 in the file becomes exactly 415/1000 in rational mode.
inline Rational json_to_rational(const nlohmann::json& v, const std::string& field) {
    try {
        if (v.is_string()) return parse_rational(v.get<std::string>());
        if (v.is_number_integer()) return Rational(BigInt(v.get<long long>()));
        if (v.is_number()) return parse_rational(v.dump());
    } catch (const std::exception&) {
    }
    throw InputError("field '" + field + "': expected a number or a \"num/den\" string, got " + v.dump());
}

inline double json_to_double(const nlohmann::json& v, const std::string& field) {
    return to_double(json_to_rational(v, field));
}

}  // namespace detail

/// Population file: {"p": [..], "n": int, "x": [..] optional}. Entries of
/// "p" may be numbers, decimal strings, or "num/den" strings; all of them
/// parse exactly, so both arithmetic modes are served from one input.
struct PopulationInput {
    std::vector<Rational> p;
    int n = 0;
    std::optional<std::vector<double>> x;

    std::vector<double> p_float() const {
        std::vector<double> out;
        out.reserve(p.size());
        for (const auto& q : p) out.push_back(to_double(q));
        return out;
    }
};

inline PopulationInput load_population(const nlohmann::json& j) {
    if (!j.is_object()) throw InputError("population file: top level must be a JSON object");
    if (!j.contains("p") || !j.at("p").is_array())
        throw InputError("field 'p': required array of probabilities");
    if (!j.contains("n") || !j.at("n").is_number_integer())
        throw InputError("field 'n': required integer sample size");
    PopulationInput in;
    in.n = j.at("n").get<int>();
    std::size_t k = 0;
    for (const auto& v : j.at("p")) in.p.push_back(detail::json_to_rational(v, "p[" + std::to_string(k++) + "]"));
    if (j.contains("x")) {
        if (!j.at("x").is_array()) throw InputError("field 'x': must be an array when present");
        std::vector<double> x;
        k = 0;
        for (const auto& v : j.at("x")) x.push_back(detail::json_to_double(v, "x[" + std::to_string(k++) + "]"));
        if (x.size() != in.p.size()) throw InputError("field 'x': length must match 'p'");
        in.x = std::move(x);
    }
    return in;
}

/// Stratified population file:
/// {"strata": [{"p": num-or-"num/den", "size": int}, ...], "n": int, "seed": int}.
struct StratifiedInput {
    std::vector<Rational> probs;
    std::vector<int> sizes;
    int n = 0;
    std::uint64_t seed = 0;

    std::vector<double> probs_float() const {
        std::vector<double> out;
        out.reserve(probs.size());
        for (const auto& q : probs) out.push_back(to_double(q));
        return out;
    }
};

inline StratifiedInput load_stratified(const nlohmann::json& j) {
    if (!j.is_object()) throw InputError("stratified file: top level must be a JSON object");
    if (!j.contains("strata") || !j.at("strata").is_array() || j.at("strata").empty())
        throw InputError("field 'strata': required nonempty array");
    if (!j.contains("n") || !j.at("n").is_number_integer())
        throw InputError("field 'n': required integer sample size");
    StratifiedInput in;
    in.n = j.at("n").get<int>();
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_integer()) throw InputError("field 'seed': must be an integer");
        in.seed = j.at("seed").get<std::uint64_t>();
    }
    std::size_t k = 0;
    for (const auto& s : j.at("strata")) {
        const std::string where = "strata[" + std::to_string(k++) + "]";
        if (!s.is_object()) throw InputError("field '" + where + "': must be an object");
        if (!s.contains("p")) throw InputError("field '" + where + ".p': required");
        if (!s.contains("size") || !s.at("size").is_number_integer())
            throw InputError("field '" + where + ".size': required integer");
        in.probs.push_back(detail::json_to_rational(s.at("p"), where + ".p"));
        in.sizes.push_back(s.at("size").get<int>());
    }
    return in;
}

inline nlohmann::json rationals_to_json(const std::vector<Rational>& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& q : v) arr.push_back(to_fraction_string(q));
    return arr;
}

}  // namespace affswor
