//! A small hand-arranged directory for walk enumeration and demos.
//!
//! 50 businesses in two sectors. Facet screens stay above the jump
//! threshold early in every path, so category and location walks can run
//! all the way to the subvillage screen.

use super::{Business, Directory, Sector};

/// One record with owner, phone and products derived from the id.
pub fn row(id: u32, name: &str, sector: Sector, subsector: &str, geo: (&str, &str, &str)) -> Business {
    Business {
        id,
        name: name.to_string(),
        owner_name: format!("{} Mushi", ["Asha", "Juma", "Neema", "Baraka"][id as usize % 4]),
        phone: format!("2557{:08}", id),
        sector,
        subsector: subsector.to_string(),
        products: vec![["seeds", "cement", "rice", "cargo"][id as usize % 4].to_string()],
        district: geo.0.to_string(),
        village: geo.1.to_string(),
        subvillage: geo.2.to_string(),
    }
}

/// Ids 1-12 general shops at Karagwe/Kanazi/Sokoni; 13-25 agro-input shops
/// (Karagwe/Rubale and Bukoba/Kashai); 26-38 boda boda at Bukoba/Kashai;
/// 39-50 lorries at Karagwe/Rubale.
pub fn fifty() -> Directory {
    let mut rows = Vec::new();
    let mut add = |name: &str, sector, sub: &str, geo: (&str, &str, &str)| {
        let id = rows.len() as u32 + 1;
        rows.push(row(id, &format!("{name} {id:02}"), sector, sub, geo));
    };
    for _ in 0..12 {
        add("Duka", Sector::Retailers, "general shops", ("Karagwe", "Kanazi", "Sokoni"));
    }
    for i in 0..13 {
        let geo = match i {
            0..5 => ("Karagwe", "Rubale", "Mtoni"),
            5..9 => ("Karagwe", "Rubale", "Kati"),
            _ => ("Bukoba", "Kashai", "Stendi"),
        };
        add("Mbegu", Sector::Retailers, "agro-input shops", geo);
    }
    for i in 0..13 {
        let sub = ["Stendi", "Sokoni", "Mtoni"][i % 3];
        add("Boda", Sector::Transporters, "boda boda", ("Bukoba", "Kashai", sub));
    }
    for i in 0..12 {
        let sub = ["Mtoni", "Kati", "Shuleni"][i % 3];
        add("Lori", Sector::Transporters, "lorries", ("Karagwe", "Rubale", sub));
    }
    Directory::new(rows).expect("fixture is valid")
}
