#pragma once

#include <algorithm>
#include <cmath>

namespace rehail {

inline constexpr double kEarthRadiusMeters = 6371008.8;
inline constexpr double kPi = 3.14159265358979323846;

inline double degToRad(double deg) { return deg * kPi / 180.0; }

/// Great-circle distance in meters between two WGS84 coordinates.
inline double haversineMeters(double lat1, double lon1, double lat2, double lon2) {
    const double phi1 = degToRad(lat1);
    const double phi2 = degToRad(lat2);
    const double dPhi = degToRad(lat2 - lat1);
    const double dLambda = degToRad(lon2 - lon1);
    const double a = std::sin(dPhi / 2) * std::sin(dPhi / 2) +
                     std::cos(phi1) * std::cos(phi2) * std::sin(dLambda / 2) * std::sin(dLambda / 2);
    return 2.0 * kEarthRadiusMeters * std::asin(std::min(1.0, std::sqrt(a)));
}

struct BBox {
    double latMin = 0;
    double lonMin = 0;
    double latMax = 0;
    double lonMax = 0;

    bool contains(double lat, double lon) const {
        return lat >= latMin && lat <= latMax && lon >= lonMin && lon <= lonMax;
    }
    bool degenerate() const { return !(latMax > latMin) || !(lonMax > lonMin); }

    void expand(double lat, double lon) {
        latMin = std::min(latMin, lat);
        latMax = std::max(latMax, lat);
        lonMin = std::min(lonMin, lon);
        lonMax = std::max(lonMax, lon);
    }

    /// Approximate area in square kilometers: height times width measured at
    /// the mid latitude. Adequate for city-scale extents.
    double areaKm2() const {
        if (degenerate()) return 0.0;
        const double midLat = (latMin + latMax) / 2;
        const double height = haversineMeters(latMin, lonMin, latMax, lonMin);
        const double width = haversineMeters(midLat, lonMin, midLat, lonMax);
        return height * width / 1e6;
    }
};

} // namespace rehail
