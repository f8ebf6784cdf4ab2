//! Parsing a transaction file with a custom column mapping and
//! aggregating it at country, BIC and IBAN level.
//!
//! cargo run --example ingest_transactions

use rankshift::graph::layer_stats;
use rankshift::ingest::{aggregate, parse_transactions, AggregationLevel, IntervalSpec, Role, Schema};

const DATA: &str = "\
day;id;from_bic;to_bic;from_iban;to_iban;from_res;to_res;from_bank;to_bank;eur;ccy;rail
2022-02-03;t1;BANKAAXX;BANKBBXX;XA01;XB01;XA;XB;XA;XB;1200.50;EUR;SEPA
2022-02-11;t2;BANKBBXX;BANKCCXX;XB01;XG07;XB;XG;XB;XG;80.00;EUR;SWIFT
2022-02-19;t3;BANKAAXX;BANKBBXX;XA02;XB01;XA;XB;XA;XB;99.50;EUR;SEPA
2022-03-01;t4;BANKCCXX;BANKAAXX;XG07;XA01;XG;XA;XG;XA;5000;EUR;SWIFT
2022-03-09;t5;BANKAAXX;BANKCCXX;XA01;XG07;XA;XG;XA;XG;-3;EUR;SWIFT
2022-03-17;t6;BANKBBXX;BANKAAXX;XB01;XA02;XB;XA;XB;XA;310.25;EUR;SEPA
";

fn main() -> rankshift::Result<()> {
    let schema = Schema::default()
        .apply([
            ("delimiter", ";"),
            ("date", "day"),
            ("transaction_id", "id"),
            ("sender_bic", "from_bic"),
            ("receiver_bic", "to_bic"),
            ("sender_iban", "from_iban"),
            ("receiver_iban", "to_iban"),
            ("sender_country_residence", "from_res"),
            ("receiver_country_residence", "to_res"),
            ("sender_country_bank", "from_bank"),
            ("receiver_country_bank", "to_bank"),
            ("amount", "eur"),
            ("currency", "ccy"),
            ("source", "rail"),
        ])
        .map_err(rankshift::Error::InvalidParameter)?;
    assert_eq!(schema.column(Role::Amount), "eur");

    let report = parse_transactions(DATA.as_bytes(), &schema)?;
    println!("{} rows, {} accepted", report.rows, report.transactions.len());
    for r in &report.rejections {
        println!("  rejected line {}: {}", r.line, r.reason);
    }

    for level in [AggregationLevel::Country, AggregationLevel::Bic, AggregationLevel::Iban] {
        let layers = aggregate(&report.transactions, level, &IntervalSpec::Monthly)?;
        println!("\n{level} level, nodes {:?}", layers[0].nodes().ids());
        for l in &layers {
            let s = layer_stats(l)?;
            let edges: Vec<String> = l
                .edges()
                .iter()
                .map(|e| format!("{}->{} {}", l.nodes().id(e.src), l.nodes().id(e.dst), e.weight))
                .collect();
            println!("  {} density {:.3}: {}", l.label(), s.density, edges.join(", "));
        }
    }
    Ok(())
}
