//! Hierarchical and partitional clustering.

mod distance;
mod hierarchical;
mod kmeans;

pub use distance::{euclidean_distances, DistanceMatrix};
pub(crate) use distance::sq_dist;
pub use hierarchical::{build_dendrogram, cut_dendrogram, Dendrogram, Linkage, Merge};
pub use kmeans::{centroids, kmeans, kmeans_traced, merge_min_centroid, KMeansInit, KMeansResult};
