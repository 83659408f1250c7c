#include "pcekit/archive.hpp"

#include <json.hpp>

#include <stdexcept>

#include "pcekit/csv.hpp"

namespace pcekit {

using nlohmann::json;

std::string surrogate_to_json(const PcSurrogate& surrogate)
{
    const PcBasis& basis = surrogate.basis();
    json families = json::array();
    for (PolyFamily f : basis.families()) families.push_back(std::string(to_string(f)));
    json indices = json::array();
    for (const auto& t : basis.terms()) indices.push_back(t.orders);

    json coeffs = json::array();
    const auto& c = surrogate.coeffs();
    for (Eigen::Index k = 0; k < c.rows(); ++k) {
        json row = json::array();
        for (Eigen::Index m = 0; m < c.cols(); ++m) row.push_back(c(k, m));
        coeffs.push_back(std::move(row));
    }

    json doc = {
        {"basis",
         {{"dim", basis.dim()},
          {"order", basis.order()},
          {"families", families},
          {"multi_indices", indices}}},
        {"log_transformed", surrogate.log_transformed()},
        {"output_labels", surrogate.labels()},
        {"coeffs", coeffs},
    };
    return doc.dump(1) + "\n";
}

PcSurrogate surrogate_from_json(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("expansion archive is not valid JSON: ") + e.what());
    }
    try {
        const json& b = doc.at("basis");
        const int dim = b.at("dim").get<int>();
        const int order = b.at("order").get<int>();
        std::vector<PolyFamily> families;
        for (const auto& f : b.at("families")) families.push_back(parse_family(f.get<std::string>()));
        std::vector<MultiIndex> terms;
        for (const auto& t : b.at("multi_indices")) terms.push_back(MultiIndex{t.get<std::vector<int>>()});
        PcBasis basis = PcBasis::from_terms(dim, order, std::move(families), std::move(terms));

        auto labels = doc.at("output_labels").get<std::vector<std::string>>();
        const json& rows = doc.at("coeffs");
        if (rows.size() != basis.size())
            throw std::invalid_argument("coeffs has " + std::to_string(rows.size()) +
                                        " rows, basis has " + std::to_string(basis.size()) + " terms");
        Eigen::MatrixXd coeffs(static_cast<Eigen::Index>(rows.size()),
                               static_cast<Eigen::Index>(labels.size()));
        for (std::size_t k = 0; k < rows.size(); ++k) {
            if (rows[k].size() != labels.size())
                throw std::invalid_argument("coeffs row " + std::to_string(k) +
                                            " length does not match output_labels");
            for (std::size_t m = 0; m < labels.size(); ++m)
                coeffs(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m)) =
                    rows[k][m].get<double>();
        }
        return PcSurrogate(std::move(basis), std::move(coeffs),
                           doc.at("log_transformed").get<bool>(), std::move(labels));
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed expansion archive: ") + e.what());
    }
}

void write_archive(const std::filesystem::path& path, const PcSurrogate& surrogate)
{
    csv::write_file_atomic(path, surrogate_to_json(surrogate));
}

PcSurrogate read_archive(const std::filesystem::path& path)
{
    return surrogate_from_json(csv::read_file(path));
}

}  // namespace pcekit
