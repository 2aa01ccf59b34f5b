#ifndef QLIM_SYMBOL_IO_HPP
#define QLIM_SYMBOL_IO_HPP

#include <qlim/toeplitz.hpp>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qlim {

/// Malformed symbol-spec document.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Symbol-spec documents are JSON:
//
//   single symbol
//     {"levels": 1, "representation": "coefficients",
//      "coefficients": [{"index": [1], "re": 1.0, "im": 0.0}], "real": false}
//     {"levels": 1, "representation": "sampled", "grid": 8,
//      "values": [0.5, 1.0, [0.0, 1.0], ...]}        // number or [re, im]
//
//   expression over named symbols
//     {"levels": 1, "symbols": {"a": {...}, "b": {...}},
//      "expr": {"sum": [{"product": ["a", "b"]}, {"product": ["a"]}]}}
//
// Sampled values are listed row-major, last level fastest.

namespace detail {

using json = nlohmann::json;

inline Complex parse_value(const json& v)
{
    if (v.is_number()) {
        return {v.get<double>(), 0.0};
    }
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return {v[0].get<double>(), v[1].get<double>()};
    }
    if (v.is_object()) {
        return {v.value("re", 0.0), v.value("im", 0.0)};
    }
    throw ParseError("sample value must be a number, [re, im] or {re, im}");
}

inline SymbolSpec parse_symbol(const json& doc, std::size_t levels)
{
    if (doc.contains("levels") && doc.at("levels").get<std::size_t>() != levels) {
        throw ParseError("symbol levels disagree with document levels");
    }
    const std::string rep = doc.at("representation").get<std::string>();
    const bool real = doc.value("real", false);
    if (rep == "coefficients") {
        CoefficientMap coeffs;
        for (const auto& entry : doc.at("coefficients")) {
            auto index = entry.at("index").get<MultiIndex>();
            const Complex value{entry.value("re", 0.0), entry.value("im", 0.0)};
            if (!coeffs.emplace(std::move(index), value).second) {
                throw ParseError("duplicate coefficient index");
            }
        }
        return SymbolSpec::from_coefficients(levels, std::move(coeffs), real);
    }
    if (rep == "sampled") {
        SampledGrid g;
        g.grid = doc.at("grid").get<std::size_t>();
        for (const auto& v : doc.at("values")) {
            g.values.push_back(parse_value(v));
        }
        return SymbolSpec::from_samples(levels, std::move(g), real);
    }
    throw ParseError("unknown representation '" + rep + "'");
}

} // namespace detail

/// Parses a symbol-spec document into a matrix expression.
inline MatrixExpr parse_symbol_spec(const std::string& text)
{
    using detail::json;
    try {
        const json doc = json::parse(text);
        const auto levels = doc.at("levels").get<std::size_t>();
        if (levels == 0) {
            throw ParseError("levels must be positive");
        }
        if (!doc.contains("symbols")) {
            return MatrixExpr::single(detail::parse_symbol(doc, levels));
        }
        std::map<std::string, SymbolSpec> named;
        for (const auto& [name, body] : doc.at("symbols").items()) {
            named.emplace(name, detail::parse_symbol(body, levels));
        }
        if (!doc.contains("expr")) {
            if (named.size() != 1) {
                throw ParseError("several symbols but no expr");
            }
            return MatrixExpr::single(named.begin()->second);
        }
        std::vector<MatrixExpr::Product> terms;
        for (const auto& term : doc.at("expr").at("sum")) {
            MatrixExpr::Product product;
            for (const auto& name : term.at("product")) {
                const auto it = named.find(name.get<std::string>());
                if (it == named.end()) {
                    throw ParseError("expr names unknown symbol '" + name.get<std::string>() + "'");
                }
                product.push_back(it->second);
            }
            terms.push_back(std::move(product));
        }
        return MatrixExpr(std::move(terms));
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError(std::string("invalid symbol spec: ") + e.what());
    }
}

inline MatrixExpr load_symbol_spec(const std::filesystem::path& path)
{
    std::ifstream f(path);
    if (!f) {
        throw ParseError("cannot read symbol file " + path.string());
    }
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_symbol_spec(buf.str());
}

inline nlohmann::json symbol_to_json(const SymbolSpec& s)
{
    nlohmann::json out;
    if (s.is_sampled()) {
        out["representation"] = "sampled";
        out["grid"] = s.samples().grid;
        auto& values = out["values"] = nlohmann::json::array();
        for (const Complex& z : s.samples().values) {
            if (z.imag() == 0.0) {
                values.push_back(z.real());
            } else {
                values.push_back({z.real(), z.imag()});
            }
        }
    } else {
        out["representation"] = "coefficients";
        auto& coeffs = out["coefficients"] = nlohmann::json::array();
        for (const auto& [index, value] : s.coefficients()) {
            coeffs.push_back({{"index", index}, {"re", value.real()}, {"im", value.imag()}});
        }
    }
    if (s.real_valued()) {
        out["real"] = true;
    }
    return out;
}

/// Serializes an expression with its factors named s1, s2, ... in order.
inline std::string expr_to_json(const MatrixExpr& expr)
{
    nlohmann::json doc;
    doc["levels"] = expr.levels();
    auto& symbols = doc["symbols"] = nlohmann::json::object();
    auto& sum = doc["expr"]["sum"] = nlohmann::json::array();
    std::size_t next = 1;
    for (const auto& product : expr.terms()) {
        nlohmann::json names = nlohmann::json::array();
        for (const auto& f : product) {
            const std::string name = "s" + std::to_string(next++);
            symbols[name] = symbol_to_json(f);
            names.push_back(name);
        }
        sum.push_back({{"product", names}});
    }
    return doc.dump(1) + "\n";
}

} // namespace qlim

#endif // QLIM_SYMBOL_IO_HPP
