# Motion capture ingestion and synthetic data
