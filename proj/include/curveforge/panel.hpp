#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "curveforge/date.hpp"

namespace curveforge {

struct Instrument {
    std::string id;
    Date maturity;
};

struct PanelObservation {
    Date date;
    std::map<std::string, double> prices;
    /// Per-instrument traded flag; instruments absent here count as negotiated.
    std::map<std::string, bool> negotiated;
};

/// Date x instrument table of observed zero prices with irregular gaps.
///
/// Invariants: dates strictly increasing, every quoted instrument is declared
/// and matures after each date it is quoted on, all prices in (0, 1].
class PricePanel {
public:
    PricePanel() = default;
    PricePanel(std::vector<Instrument> instruments, std::vector<PanelObservation> observations);

    const std::vector<Instrument>& instruments() const { return instruments_; }
    const std::vector<PanelObservation>& observations() const { return observations_; }
    const Instrument& instrument(const std::string& id) const;
    std::size_t size() const { return observations_.size(); }

    /// ACT/365 gaps between consecutive observation dates.
    std::vector<Time> gaps() const;

    /// Keeps only the observations on which every instrument was negotiated.
    PricePanel negotiated_only() const;

    /// Restricts to `ids`, dropping dates where any of them is unquoted.
    PricePanel select(std::span<const std::string> ids) const;

private:
    std::vector<Instrument> instruments_;
    std::vector<PanelObservation> observations_;
};

}  // namespace curveforge
