"Sub-module for data types"

from dataclasses import dataclass
from functools import reduce
from typing import Callable, Any, Type, Mapping
import time
from yaml import safe_load


class StopWatch():
    """simple start-stop timer, call it to get the lap time in seconds"""
    def __init__(self) -> None:
        self.start = time.perf_counter()
    def __call__(self) -> float:
        start, end = self.start, time.perf_counter()
        self.start = end
        return end - start


class FieldError(Exception):
    """Config field missing, empty or of the wrong type"""
    def __init__(self, path: str, message: str) -> None:
        super().__init__(f"{path}: {message}")
        self.path = path


# transforms every schema understands, modules may register more through from_yaml
BASE_TRANSFORMS: dict[str, Callable] = {
    "number -> float": float,
    "list -> ints": lambda xs: [int(x) for x in xs],
}


@dataclass
class FieldSchema:
    """
    Ruleset for the extraction of a single field from a nested config mapping.
    Use together with RecordSchema to extract collections of fields.

    params:
        - src: str
            the key-path, delimited by "." (by default) to get nested keys
            i.e. src="sim.dt" -> data["sim"]["dt"]
        - dtype (optional, default None): type or tuple of types
            if set, a FieldError is raised if the value at src is not of this type
        - dst (optional, defaults to src in post-init): str
            the destination key in the extracted record, never interpreted as a path
        - allow_undefined (optional, default False):
            if set, missing key-paths do not raise
        - allow_none (optional, default False): bool
            if set, explicit nulls do not raise
        - replace_undefined_with (optional, default None): Any
            the default for a missing key-path, setting it implies allow_undefined
        - replace_none_with (optional, default None): Any
            the value replacing an explicit null, setting it implies allow_none
        - transform (optional, default None): callable
            called on the value found at the key-path
        - transform_replacements (optional, default False): bool
            if set, transform is also called on replaced values
        - delimiter (optional, default '.'): str
    """

    src: str
    dtype: Type | tuple[Type, ...] | None = None
    dst: str | None = None
    allow_undefined: bool = False
    allow_none: bool = False
    replace_undefined_with: Any = None
    replace_none_with: Any = None
    transform: Callable | None = None
    transform_replacements: bool = False
    delimiter: str = "."

    def __post_init__(self):
        if self.dst is None:
            self.dst = self.src
        if self.transform_replacements and self.transform is None:
            raise TypeError("transform function is not set even though transform_replacements is set")
        if self.replace_undefined_with is not None:
            self.allow_undefined = True
        if self.replace_none_with is not None:
            self.allow_none = True

    def _replace(self, value: Any) -> Any:
        if self.transform_replacements and value is not None:
            return self.transform(value)  # type: ignore
        return value

    def _get_value(self, data: Mapping) -> Any:
        try:
            value: Any = reduce(lambda d, k: d[k], self.src.split(self.delimiter), data)
        except (KeyError, TypeError, IndexError):
            if not self.allow_undefined:
                raise FieldError(self.src, "is required") from None
            return self._replace(self.replace_undefined_with)
        if value is None:
            if not self.allow_none:
                raise FieldError(self.src, "must not be null")
            return self._replace(self.replace_none_with)
        if self.dtype is not None and not isinstance(value, self.dtype):
            raise FieldError(self.src, f"expected {self.dtype} but got {type(value).__name__}")
        if self.transform is None:
            return value
        try:
            return self.transform(value)
        except (TypeError, ValueError) as exc:
            raise FieldError(self.src, str(exc)) from exc

    def __call__(self, data: Mapping, as_record: bool = False) -> Any:
        """
        Extracts the field's value from the data.

        params:
            - data: dict or dict-like
            - as_record (optional, default False): bool
                if set, returns {dst: value} instead of value

        >>> FieldSchema('h', (int, float))({'h': 1.5})
        1.5
        >>> try: FieldSchema('h', (int, float))({'h': 'slow'})
        ... except FieldError as exc: str(exc)
        "h: expected (<class 'int'>, <class 'float'>) but got str"
        >>> try: FieldSchema('sim.dt')({'sim': {}})
        ... except FieldError as exc: exc.path
        'sim.dt'
        >>> FieldSchema('sim.dt', replace_undefined_with=1e-3)({})
        0.001
        >>> FieldSchema('Ns', dst='n_values', transform=sorted)({'Ns': [16, 8]}, as_record=True)
        {'n_values': [8, 16]}
        """
        value = self._get_value(data)
        if as_record:
            return {self.dst: value}
        return value


@dataclass
class RecordSchema:
    """
    A schema for extracting a record of config fields; a collection of FieldSchemas.

    params:
        - fields, a list of FieldSchemas
    """

    fields: list[FieldSchema]

    def __call__(self, data: Mapping) -> dict[str, Any]:
        """
        extracts record from dict
        >>> RecordSchema([FieldSchema('grid.min', float, 'omega_min')])({'grid': {'min': 1e-4}})
        {'omega_min': 0.0001}
        """
        return {field.dst: field(data) for field in self.fields}  # type: ignore

    @classmethod
    def from_yaml(cls, data: str, transforms: Mapping[str, Callable] | None = None):
        """
        Creates a RecordSchema from a yaml document string.
        The document has a key fields with a list of mappings matching the FieldSchema
        init signature. A transform is named by a key of BASE_TRANSFORMS or of the
        extra transforms mapping.

        params:
            - data: yaml string
            - transforms (optional): additional named transforms

        returns
            - RecordSchema

        >>> f = \"\"\"
        ... fields:
        ...     - src: sim.dt
        ...       dst: dt
        ...       transform: number -> float
        ...       replace_undefined_with: 0.001
        ...     - src: Ns
        ...       transform: list -> ints
        ...       allow_undefined: true
        ... \"\"\"
        >>> rs = RecordSchema.from_yaml(f)
        >>> rs({'sim': {'dt': 1}})
        {'dt': 1.0, 'Ns': None}
        >>> rs({'Ns': [8, 16]})
        {'dt': 0.001, 'Ns': [8, 16]}
        """
        lookup = dict(BASE_TRANSFORMS)
        lookup.update(transforms or {})
        document = safe_load(data)
        fields = []
        for rule in document["fields"]:
            if "transform" in rule:
                rule["transform"] = lookup[rule["transform"]]
            fields.append(FieldSchema(**rule))
        return RecordSchema(fields)
