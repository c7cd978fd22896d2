"""Database models for the transaction ledger."""
from sqlalchemy import BigInteger, Boolean, Column, Date, ForeignKey, Index, Integer, String, Time
from sqlalchemy.orm import declarative_base, relationship


Base = declarative_base()

SCHEMA_VERSION = "2"


class SchemaInfo(Base):
    """Key/value metadata; holds the schema version stamp."""
    __tablename__ = "schema_info"

    key = Column(String(64), primary_key=True)
    value = Column(String(255), nullable=False)


class Transaction(Base):
    """One confirmed transaction, stored once per hash."""
    __tablename__ = "transactions"

    hash = Column(String(64), primary_key=True)
    gmt_date = Column(Date, nullable=False, index=True)
    gmt_time = Column(Time, nullable=False)
    is_coinbase = Column(Boolean, default=False, nullable=False)

    # Relationships
    inputs = relationship(
        "TxInput", back_populates="transaction", cascade="all, delete-orphan", order_by="TxInput.position"
    )
    outputs = relationship(
        "TxOutput", back_populates="transaction", cascade="all, delete-orphan", order_by="TxOutput.position"
    )
    payments = relationship("Payment", back_populates="transaction", cascade="all, delete-orphan")


class TxInput(Base):
    """Typed form of the input address list; address is NULL when unaddressable."""
    __tablename__ = "tx_inputs"

    tx_hash = Column(String(64), ForeignKey("transactions.hash"), primary_key=True)
    position = Column(Integer, primary_key=True)
    address = Column(String(35), nullable=True, index=True)
    amount = Column(BigInteger, nullable=False)

    transaction = relationship("Transaction", back_populates="inputs")


class TxOutput(Base):
    """Typed form of the output address list; address is NULL when unaddressable."""
    __tablename__ = "tx_outputs"

    tx_hash = Column(String(64), ForeignKey("transactions.hash"), primary_key=True)
    position = Column(Integer, primary_key=True)
    address = Column(String(35), nullable=True)
    amount = Column(BigInteger, nullable=False)

    transaction = relationship("Transaction", back_populates="outputs")


class Payment(Base):
    """Credit of satoshis to one tracked address within one transaction."""
    __tablename__ = "payments"

    tx_hash = Column(String(64), ForeignKey("transactions.hash"), primary_key=True)
    address = Column(String(35), primary_key=True)
    btc_to_addr = Column(BigInteger, nullable=False)  # satoshis
    address_as_input = Column(Boolean, default=False, nullable=False)
    gmt_date = Column(Date, nullable=False)
    gmt_time = Column(Time, nullable=False)

    transaction = relationship("Transaction", back_populates="payments")

    __table_args__ = (Index("ix_payments_address_date", "address", "gmt_date", "gmt_time"),)
