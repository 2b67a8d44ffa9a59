#include "curveforge/panel.hpp"

#include <algorithm>

#include "curveforge/error.hpp"

namespace curveforge {

PricePanel::PricePanel(std::vector<Instrument> instruments, std::vector<PanelObservation> observations)
    : instruments_(std::move(instruments)), observations_(std::move(observations)) {
    for (std::size_t i = 0; i < instruments_.size(); ++i)
        for (std::size_t j = i + 1; j < instruments_.size(); ++j)
            CURVEFORGE_REQUIRE(instruments_[i].id != instruments_[j].id, ErrorKind::Ambiguity,
                               "instrument '" + instruments_[i].id + "' declared twice");
    for (std::size_t k = 0; k < observations_.size(); ++k) {
        const auto& obs = observations_[k];
        if (k > 0)
            CURVEFORGE_REQUIRE(observations_[k - 1].date < obs.date, ErrorKind::Ordering,
                               "panel dates must be strictly increasing at " + obs.date.iso());
        for (const auto& [id, price] : obs.prices) {
            const Instrument& inst = instrument(id);
            CURVEFORGE_REQUIRE(inst.maturity > obs.date, ErrorKind::Precondition,
                               "instrument '" + id + "' quoted on or after its maturity at " + obs.date.iso());
            CURVEFORGE_REQUIRE(price > 0.0 && price <= 1.0, ErrorKind::Domain,
                               "price of '" + id + "' on " + obs.date.iso() + " outside (0, 1]");
        }
    }
}

const Instrument& PricePanel::instrument(const std::string& id) const {
    const auto it = std::find_if(instruments_.begin(), instruments_.end(),
                                 [&](const Instrument& i) { return i.id == id; });
    CURVEFORGE_REQUIRE(it != instruments_.end(), ErrorKind::Precondition,
                       "instrument '" + id + "' is not declared in the panel");
    return *it;
}

std::vector<Time> PricePanel::gaps() const {
    std::vector<Time> out;
    for (std::size_t k = 1; k < observations_.size(); ++k)
        out.push_back(year_fraction(observations_[k - 1].date, observations_[k].date));
    return out;
}

PricePanel PricePanel::negotiated_only() const {
    std::vector<PanelObservation> kept;
    for (const auto& obs : observations_) {
        const bool all = std::all_of(obs.negotiated.begin(), obs.negotiated.end(),
                                     [](const auto& kv) { return kv.second; });
        if (all) kept.push_back(obs);
    }
    return PricePanel(instruments_, std::move(kept));
}

PricePanel PricePanel::select(std::span<const std::string> ids) const {
    std::vector<Instrument> insts;
    for (const auto& id : ids) insts.push_back(instrument(id));
    std::vector<PanelObservation> kept;
    for (const auto& obs : observations_) {
        PanelObservation o{obs.date, {}, {}};
        bool complete = true;
        for (const auto& id : ids) {
            const auto it = obs.prices.find(id);
            if (it == obs.prices.end()) { complete = false; break; }
            o.prices.emplace(id, it->second);
            if (const auto n = obs.negotiated.find(id); n != obs.negotiated.end())
                o.negotiated.emplace(id, n->second);
        }
        if (complete) kept.push_back(std::move(o));
    }
    return PricePanel(std::move(insts), std::move(kept));
}

}  // namespace curveforge
