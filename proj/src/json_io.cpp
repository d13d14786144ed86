#include "icap/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <utility>
#include <vector>

namespace icap {
namespace {

const char* flag_name(Flag f) {
    switch (f) {
        case Flag::f00: return "00";
        case Flag::f01: return "01";
        case Flag::f10: return "10";
        case Flag::f11: return "11";
    }
    return "??";
}

const char* status_name(ValueStatus s) {
    switch (s) {
        case ValueStatus::exact: return "exact";
        case ValueStatus::bracket: return "bracket";
        case ValueStatus::approximate: return "approximate";
    }
    return "??";
}

Json vec_to_json(const Vec& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Json ivec_to_json(const Eigen::VectorXi& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Json mat_to_json(const Mat& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

Json to_json(const Channel& w) {
    return Json{{"m", w.m()}, {"n", w.n()}, {"rows", mat_to_json(w.entries())}};
}

Channel channel_from_json(const Json& j) {
    const int m = j.at("m").get<int>();
    const int n = j.at("n").get<int>();
    const auto& rows = j.at("rows");
    if (!rows.is_array() || static_cast<int>(rows.size()) != m)
        throw WrongShape("\"rows\" must be an array of m rows");
    Mat p(m, n);
    for (int i = 0; i < m; ++i) {
        const auto& row = rows.at(static_cast<std::size_t>(i));
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            throw WrongShape("each row must hold n numbers");
        for (int k = 0; k < n; ++k) p(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
    }
    return Channel::validate(p);
}

Channel load_channel(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open channel file: " + path);
    Json j;
    in >> j;
    return channel_from_json(j);
}

Json to_json(const Decomposition& lambda) {
    Json atoms = Json::array();
    for (const auto& [d, weight] : lambda.atoms()) {
        Json image = Json::array();
        for (int v : d.image) image.push_back(v + 1);
        atoms.push_back(Json{{"image", std::move(image)}, {"weight", weight}});
    }
    return Json{{"m", lambda.m}, {"n", lambda.n}, {"atoms", std::move(atoms)}};
}

Decomposition decomposition_from_json(const Json& j) {
    const int m = j.at("m").get<int>();
    const int n = j.at("n").get<int>();
    std::vector<std::pair<std::vector<int>, double>> atoms;
    for (const auto& atom : j.at("atoms")) {
        const auto& image = atom.at("image");
        if (!image.is_array() || static_cast<int>(image.size()) != m)
            throw WrongShape("each atom image must hold m output indices");
        std::vector<int> map(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            const int v = image.at(static_cast<std::size_t>(i)).get<int>();
            if (v < 1 || v > n) throw DomainError("atom images are 1-based output indices");
            map[static_cast<std::size_t>(i)] = v - 1;
        }
        atoms.emplace_back(std::move(map), atom.at("weight").get<double>());
    }
    return Decomposition::from_atoms(m, n, atoms);
}

Json to_json(const RankProbReport& r) {
    Json out{{"lower_rank1", r.lower_rank1}, {"upper_rank1", r.upper_rank1},
             {"g", r.g},                     {"alpha", vec_to_json(r.alpha)},
             {"perfect_upper", r.perfect_upper}, {"beta_or_h", r.beta_or_h}};
    out["exact_perfect"] = r.exact_perfect ? Json(*r.exact_perfect) : Json(nullptr);
    return out;
}

Json to_json(const RankProfile& r) {
    Json out = Json::object();
    for (const auto& [rank, weight] : r.probs) out[std::to_string(rank)] = weight;
    return out;
}

Json to_json(const CapacityCertificate& c) {
    return Json{{"capacity", c.capacity},
                {"input_dist", vec_to_json(c.input_dist.p)},
                {"output_dist", vec_to_json(c.output_dist)},
                {"divergences", vec_to_json(c.divergences)},
                {"gap", c.gap}};
}

Json to_json(const ICReport& r) {
    Json out{{"flag", flag_name(r.flag)},
             {"lower", r.lower},
             {"upper", r.upper},
             {"lower_bracket", Json{{"lo", r.lower_bracket.lo}, {"hi", r.lower_bracket.hi}}},
             {"upper_bracket", Json{{"lo", r.upper_bracket.lo}, {"hi", r.upper_bracket.hi}}},
             {"lower_status", status_name(r.lower_status)},
             {"upper_status", status_name(r.upper_status)}};
    if (r.lower_witness) out["lower_witness"] = to_json(*r.lower_witness);
    if (r.upper_witness) out["upper_witness"] = to_json(*r.upper_witness);
    if (r.ingredients) {
        const BoundIngredients& ing = *r.ingredients;
        Json ij{{"o", ing.o}};
        if (ing.w_prime) ij["w_prime"] = mat_to_json(*ing.w_prime);
        if (ing.a_lower) ij["a_lower"] = ivec_to_json(*ing.a_lower);
        if (ing.gamma_lower) ij["gamma_lower"] = *ing.gamma_lower;
        if (ing.a_upper) ij["a_upper"] = ivec_to_json(*ing.a_upper);
        if (ing.b_upper) ij["b_upper"] = ivec_to_json(*ing.b_upper);
        if (ing.gamma_upper) ij["gamma_upper"] = *ing.gamma_upper;
        out["ingredients"] = std::move(ij);
    }
    return out;
}

Json to_json(const BinaryBinaryReport& r) {
    return Json{{"eps1", r.eps1},         {"eps2", r.eps2},
                {"lower11", r.lower11},   {"lower10", r.lower10},
                {"lower01", r.lower01},   {"upper11", r.upper11},
                {"upper10", r.upper10},   {"upper01", r.upper01}};
}

Json to_json(const VerifyReport& r) {
    Json items = Json::array();
    for (const auto& item : r.items) {
        Json values = Json::array();
        for (const auto& v : item.values)
            values.push_back(Json{{"name", v.name},
                                  {"observed", v.observed},
                                  {"expected", v.expected},
                                  {"tolerance", v.tolerance},
                                  {"pass", v.pass}});
        items.push_back(Json{{"name", item.name},
                             {"pass", item.pass},
                             {"note", item.note},
                             {"values", std::move(values)}});
    }
    return Json{{"all_pass", r.all_pass()}, {"items", std::move(items)}};
}

std::string csv_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return buf;
}

}  // namespace icap
