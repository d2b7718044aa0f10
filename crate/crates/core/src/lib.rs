//! Mechanisms for a revenue-maximizing intermediary between sellers with
//! private costs and a buyer with private values.
//!
//! The pipeline: sellers report costs, [`strategies::reduce_costs`] turns them
//! into virtual costs, a [`PricingStrategy`] posts a menu to the buyer, the
//! buyer chooses under one of the [`AttentionMode`]s, and the winning seller
//! is paid by [`payments::seller_payment`]. The [`oracle`] module computes
//! exact optima on discretized instances for comparison.

pub mod buyer;
pub mod dist;
pub mod error;
pub mod market;
pub mod numeric;
pub mod oracle;
pub mod payments;
pub mod rng;
pub mod single_item;
pub mod strategies;

pub use buyer::{expected_revenue, purchase_probabilities, AttentionMode, BuyerOutcome, BuyerValuation, PriceMenu};
pub use dist::{DistributionSpec, Family};
pub use error::{Error, Result};
pub use market::{FamilyKind, Item, MarketInstance};
pub use payments::{seller_payment, PaymentSchedule};
pub use single_item::{myerson_price, price_with_outside_option, SingleItemQuote};
pub use strategies::{
    AnonymousReserve, BestSingleItem, Cascade, CascadeOrder, Diagnostics, KLimited, PricingStrategy, StrategyResult,
};
