#pragma once

// Complex matrices as JSON: an array of rows, each row an array of [re, im].

#include <nlohmann/json.hpp>

#include <string>

#include "accform/numerics.hpp"

namespace accform {

using Json = nlohmann::ordered_json;

inline Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Json matrix_to_json(const ComplexMatrix& m) {
    Json rows = Json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Json vector_to_json(const ComplexVector& v) {
    Json out = Json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
    return out;
}

inline Complex complex_from_json(const Json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw InputError(where + ": entry must be a [re, im] pair of numbers");
    return {j[0].get<double>(), j[1].get<double>()};
}

// Parses a matrix; rows/cols of -1 accept any shape. Ragged or empty row lists
// are rejected unless the expected row count is 0.
inline ComplexMatrix matrix_from_json(const Json& j, const std::string& name, Index rows = -1,
                                      Index cols = -1) {
    if (!j.is_array()) throw InputError(name + ": matrix must be an array of rows");
    const Index r = static_cast<Index>(j.size());
    if (rows >= 0 && r != rows)
        throw DimensionError(name + ": expected " + std::to_string(rows) + " rows, found " +
                             std::to_string(r));
    Index c = cols;
    if (r > 0) {
        if (!j[0].is_array()) throw InputError(name + ": row 0 is not an array");
        c = static_cast<Index>(j[0].size());
    }
    if (c < 0) c = 0;
    if (cols >= 0 && c != cols)
        throw DimensionError(name + ": expected " + std::to_string(cols) + " columns, found " +
                             std::to_string(c));
    ComplexMatrix m(r, c);
    for (Index i = 0; i < r; ++i) {
        const Json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Index>(row.size()) != c)
            throw DimensionError(name + ": row " + std::to_string(i) + " has wrong length");
        for (Index k = 0; k < c; ++k)
            m(i, k) = complex_from_json(row[static_cast<std::size_t>(k)],
                                        name + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
    }
    require_finite(m, name);
    return m;
}

inline ComplexVector vector_from_json(const Json& j, const std::string& name) {
    if (!j.is_array()) throw InputError(name + ": vector must be an array");
    ComplexVector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v(static_cast<Index>(i)) = complex_from_json(j[i], name);
    return v;
}

inline Json parse_json(std::string_view text, const std::string& what) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(what + ": JSON parse error: " + e.what());
    }
}

inline void reject_unknown_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                                const std::string& what) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) throw InputError(what + ": unknown key \"" + key + "\"");
    }
}

inline Index count_from_json(const Json& obj, const char* key, const std::string& what) {
    if (!obj.contains(key)) throw InputError(what + ": missing key \"" + key + "\"");
    const Json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 1)
        throw InputError(what + ": \"" + key + "\" must be a positive integer");
    return static_cast<Index>(v.get<long long>());
}

}  // namespace accform
